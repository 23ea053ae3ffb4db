from pynbhd.stats.welch import Alternative, WelchResult, regularized_incomplete_beta, student_t_upper_tail,\
    welch_one_sided


__all__ = ['Alternative', 'WelchResult', 'regularized_incomplete_beta', 'student_t_upper_tail', 'welch_one_sided']
