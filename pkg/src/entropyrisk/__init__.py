"""Entropy and mutual-information measures of uncertainty for return series.

Histogram entropy estimates sit alongside the variance-based Market Model
decomposition, together with a residual test battery and a random-portfolio
diversification experiment.
"""

from .diagnostics import (StabilityPath, TestResult, cusum, cusum_sq, engle_arch,
                          jarque_bera, ljung_box, recursive_residuals)
from .entropy import (EntropyEstimate, HistogramSpec, conditional_entropy,
                      differential_entropy, entropy_discrete, joint_entropy, normal_entropy)
from .errors import (AlignmentError, ConfigError, ConsistencyError, DataError,
                     DegenerateError, DomainError, EntropyRiskError, FormatError,
                     InsufficientDataError)
from .ingest import PriceSeries, ReturnSeries, SummaryStats, describe, load_prices, log_returns
from .market_model import MarketModelFit, fit_market_model, risk_decomposition
from .mutinfo import (AdaptiveOptions, MiEstimate, PartitionTree, entropy_decomposition,
                      global_correlation, mutual_information_adaptive,
                      mutual_information_grid, normal_mutual_information)
from .portfolio import DiversificationCurve, Portfolio, diversification_curve, portfolio_returns
from .report import DependenceReport, RunConfig, run_full_report
from .synth import GeneratorConfig, generate

__version__ = "0.1.0"
