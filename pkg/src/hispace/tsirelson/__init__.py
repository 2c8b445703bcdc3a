"""Mixed-Tsirelson / d-product norm engine."""
from .analysis import Analysis, analysis_of, analysis_violations
from .averages import (RIS, AverageResult, InsufficientBlocks, IterationBoundExceeded,
                       ParamsTooShort, build_average, build_ris, iteration_bound)
from .checks import (check_interval_splits, check_ris_action, check_upper_p, ris_case_bound,
                     upper_exponent)
from .enumerate import BudgetExceeded, NormingTable, enumerate_norming_set, norming_table
from .norm import (CertLeaf, CertNode, NormCert, NormTable, cert_evaluate, cert_from_json,
                   cert_functional, cert_violations, mt_norm, norm_table, norm_value)
from .params import MTParams, Scheme
