"""Local graph clustering: lazy walks, Lovász–Simonovits curves, evolving sets, mixing bounds."""

__version__ = "0.1.0"

from .graph import Graph, GraphFormatError, conductance, generate, parse_edge_list, write_edge_list
from .walks import WalkOperator, expected_remain, good_core, remain_probability
from .lscurve import LSCurve, SweepResult, abs_structural_check, build_curve, threshold_algorithm, threshold_rank
from .esp import ParEspConfig, esp_kernel, growth_gauge, par_esp, run_vb_esp, volume_biased_kernel
from .mixing import MixingReport, mixing_lower_bound, tv_mixing_time, uniform_mixing_time

__all__ = [
    "Graph", "GraphFormatError", "conductance", "generate", "parse_edge_list", "write_edge_list",
    "WalkOperator", "expected_remain", "good_core", "remain_probability",
    "LSCurve", "SweepResult", "abs_structural_check", "build_curve", "threshold_algorithm", "threshold_rank",
    "ParEspConfig", "esp_kernel", "growth_gauge", "par_esp", "run_vb_esp", "volume_biased_kernel",
    "MixingReport", "mixing_lower_bound", "tv_mixing_time", "uniform_mixing_time",
]
