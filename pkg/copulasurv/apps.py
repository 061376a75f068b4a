from django.apps import AppConfig
from . import VERSION

CLAYTON = 'clayton'
GUMBEL = 'gumbel'
INVGAUSS = 'invgauss'
FAMILIES = (CLAYTON, GUMBEL, INVGAUSS)

ONE_STAGE = 'one-stage'
TWO_STAGE = 'two-stage'
SEMIPARAM = 'semiparam'
METHODS = (ONE_STAGE, TWO_STAGE, SEMIPARAM)


class CopulaSurvConfig(AppConfig):
    name = 'copulasurv'
    verbose_name = 'Copula survival models'
    version = VERSION

    # Optimizer iteration budget shared by every fitting routine
    max_iterations = 200

    # Convergence: parameter change and score norm
    param_tolerance = 1e-8
    score_tolerance = 1e-6

    # Relative step of central finite differences (gradients, Hessians, theta score)
    fd_step = 1e-5

    # Stage-2 theta search: number of grid points and natural-scale bounds per family
    theta_grid_size = 8
    theta_search_bounds = {
        CLAYTON: (1e-3, 20.0),
        GUMBEL: (0.02, 0.995),
        INVGAUSS: (1e-3, 20.0),
    }

    # Marginal survival values below this floor raise an underflow error
    survival_floor = 1e-300

    # Grouped jackknife: None means one group per cluster
    jackknife_groups = None

    # Largest tolerated share of failed jackknife refits / failed replicates
    jackknife_failure_limit = 0.05
    replicate_failure_limit = 0.10

    # Worker processes; COPULASURV_THREADS environment variable takes precedence
    threads = 1

    # Significant digits written for times and covariates
    time_digits = 12

    # JSON report schema
    schema_version = 1

    # Simulation defaults
    default_seed = 42
    covariate_probability = 0.5

    def ready(self):
        super(CopulaSurvConfig, self).ready()
