from pynbhd.pipeline.evaluation import CRITICAL_ZONE, NeighborhoodEvaluation, CriticalReport, candidate_filter,\
    neighborhood_loss, evaluate_all
from pynbhd.pipeline.overlap import OverlapReport, overlap_analysis
from pynbhd.pipeline.plot_data import ScatterRow, BoxStats, box_stats, emit_plot_data
from pynbhd.pipeline.report import SCHEMA_VERSION, report_to_dict, overlap_to_dict, write_report,\
    write_overlap, write_sweep


__all__ = ['CRITICAL_ZONE', 'NeighborhoodEvaluation', 'CriticalReport', 'candidate_filter', 'neighborhood_loss',
           'evaluate_all', 'OverlapReport', 'overlap_analysis', 'ScatterRow', 'BoxStats', 'box_stats',
           'emit_plot_data', 'SCHEMA_VERSION', 'report_to_dict', 'overlap_to_dict', 'write_report',
           'write_overlap', 'write_sweep']
