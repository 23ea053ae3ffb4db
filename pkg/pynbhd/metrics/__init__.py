from pynbhd.metrics.metrics import Mode, RankingSample, MetricBundle, SampleLosses, mse, mae, rmse,\
    prediction_bundle, precision_at_k, recall_at_k, f1_at_k, ranking_bundle, ranking_samples, per_user_metrics


__all__ = ['Mode', 'RankingSample', 'MetricBundle', 'SampleLosses', 'mse', 'mae', 'rmse', 'prediction_bundle',
           'precision_at_k', 'recall_at_k', 'f1_at_k', 'ranking_bundle', 'ranking_samples', 'per_user_metrics']
