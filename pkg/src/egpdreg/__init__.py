"""Extended generalized Pareto distributions with distributional regression.

The distribution core composes a carrier CDF on [0, 1] with the
generalized Pareto kernel, covering the full range of a positive response
while keeping Pareto behavior in both tails.  On top of it sit link
functions, penalized spline smoothers, a cyclic quasi-Newton fitter for
GAM-style distributional regression, model-comparison and calibration
diagnostics, and a station-precipitation data pipeline with a CLI.
"""

from .carriers import CarrierFamily, carrier_cdf, carrier_inverse, carrier_pdf
from .diagnostics import (
    CriterionReport,
    PPData,
    criterion_report,
    gaic,
    pit_residuals,
    seasonal_split,
    tail_pp,
    validation_deviance,
)
from .egpd import (
    EgpdParams,
    TailProfile,
    egpd_cdf,
    egpd_logpdf,
    egpd_logpdf_grad,
    egpd_pdf,
    egpd_quantile,
    egpd_sample,
    tail_profile,
)
from .errors import (
    ConfigError,
    DataError,
    DomainError,
    EgpdError,
    FitError,
    IngestError,
    NumericalError,
    ParameterError,
    UnsupportedFeatureError,
)
from .families import FIT_FAMILIES, get_family
from .fitter import (
    FitControl,
    FittedModel,
    ModelSpec,
    constant_model,
    effective_df,
    fit,
    model_grid_spec,
    penalized_loglik,
    predict_params,
    select_lambda,
    standard_errors,
)
from .gpd import gpd_cdf, gpd_inverse, gpd_pdf
from .links import LinkFunction, dinvlink_deta, linkfun, linkinv, parse_link
from .pipeline import (
    ColumnMap,
    aggregate_hourly,
    ingest,
    prepare,
    read_canonical_csv,
    split_stations,
    write_canonical_csv,
)
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .smoothers import (
    BasisRealization,
    TermSpec,
    build_cyclic_basis,
    build_thinplate_basis,
    evaluate_term,
)

__version__ = "0.1.0"
