"""Locally D-optimal approximate designs for bivariate copula regression models.

Quick start::

    from copuladesign import GaussianMarginProblem, fedorov_wynn
    result = fedorov_wynn(GaussianMarginProblem())
    print(result.design, result.report.summary())
"""

from .copula import (
    CopulaFamily,
    CopulaSpec,
    alpha_from_tau,
    is_attainable,
    tau_from_alpha,
    tau_range,
)
from .design import (
    CertificationReport,
    DesignMeasure,
    canonicalize,
    certify,
    d_efficiency,
    efficiency_loss_percent,
    frechet_d,
    gateaux_d,
    sensitivity,
)
from .errors import (
    AttainabilityError,
    BoundaryError,
    ConfigError,
    CopulaDesignError,
    DegenerateInformationError,
    DesignValidationError,
    InitializationError,
    InternalConsistencyError,
    ParameterDomainError,
    QuadratureError,
    SingularDesignError,
)
from .fim import (
    QuadratureRule,
    binary_fim_oracle,
    design_fim,
    elementary_fim,
    elementary_fim_binary,
    elementary_fim_continuous,
    log_det,
)
from .models import (
    BinaryLogisticProblem,
    GaussianMarginProblem,
    LocalParameters,
    PolynomialTrend,
    cell_probs,
    marginal_prob,
)
from .optimizer import (
    LossRow,
    OptimizationResult,
    OptimizerConfig,
    fedorov_wynn,
    ignorance_loss_table,
    misspecification_table,
    refine_weights,
)

__version__ = "0.1.0"
