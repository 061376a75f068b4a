"""
Built-in replication grid: every (copula, theta0, K, censoring) cell of the
published simulation study, named ``<copula>-<theta0>-k<K>-c<percent>``,
e.g. ``clayton-0.5-k200-c0``.
"""
from collections import OrderedDict, namedtuple

from copulasurv.apps import CLAYTON, GUMBEL, ONE_STAGE, SEMIPARAM, TWO_STAGE
from copulasurv.exceptions import DomainError

THETAS = OrderedDict([
    (CLAYTON, (0.2, 0.5, 1.0, 1.5)),
    (GUMBEL, (0.2, 0.5, 0.8)),
])
CLUSTER_COUNTS = (50, 200)

# censoring percentage -> Weibull censoring (lambda_C, rho_C)
CENSORING = OrderedDict([
    (0, None),
    (25, (0.0274, 1.5)),
    (50, (0.1464, 1.5)),
])

# Published (mean, mean SE, coverage) for one-stage, two-stage, semiparametric;
# keyed by (copula, theta0, K) with one triple of triples per censoring level
_PUBLISHED = {
    (CLAYTON, 0.2, 50): (
        ((0.206, 0.043, 0.96), (0.203, 0.044, 0.94), (0.201, 0.047, 0.90)),
        ((0.207, 0.049, 0.96), (0.206, 0.049, 0.96), (0.204, 0.049, 0.96)),
        ((0.207, 0.056, 0.98), (0.206, 0.057, 0.98), (0.207, 0.060, 0.93))),
    (CLAYTON, 0.5, 50): (
        ((0.501, 0.084, 0.96), (0.495, 0.093, 0.87), (0.472, 0.099, 0.79)),
        ((0.501, 0.091, 0.96), (0.496, 0.099, 0.92), (0.490, 0.104, 0.84)),
        ((0.506, 0.102, 0.95), (0.502, 0.108, 0.93), (0.499, 0.114, 0.93))),
    (CLAYTON, 1.0, 50): (
        ((1.016, 0.162, 0.94), (0.984, 0.168, 0.86), (0.873, 0.160, 0.72)),
        ((1.021, 0.170, 0.93), (0.994, 0.174, 0.86), (0.948, 0.185, 0.83)),
        ((1.015, 0.180, 0.94), (0.995, 0.185, 0.91), (0.962, 0.194, 0.85))),
    (CLAYTON, 1.5, 50): (
        ((1.476, 0.235, 0.90), (1.429, 0.254, 0.81), (1.205, 0.223, 0.54)),
        ((1.475, 0.240, 0.92), (1.450, 0.261, 0.87), (1.351, 0.269, 0.78)),
        ((1.475, 0.252, 0.91), (1.473, 0.279, 0.87), (1.385, 0.281, 0.83))),
    (GUMBEL, 0.2, 50): (
        ((0.193, 0.020, 0.87), (0.203, 0.024, 0.97), (0.245, 0.029, 0.68)),
        ((0.203, 0.011, 1.00), (0.205, 0.024, 0.95), (0.247, 0.015, 0.67)),
        ((0.202, 0.022, 0.97), (0.207, 0.025, 0.94), (0.256, 0.035, 0.62))),
    (GUMBEL, 0.5, 50): (
        ((0.505, 0.040, 0.94), (0.503, 0.046, 0.96), (0.516, 0.047, 0.94)),
        ((0.507, 0.041, 0.95), (0.503, 0.049, 0.93), (0.518, 0.051, 0.94)),
        ((0.506, 0.043, 0.96), (0.504, 0.052, 0.92), (0.521, 0.054, 0.90))),
    (GUMBEL, 0.8, 50): (
        ((0.805, 0.034, 0.92), (0.799, 0.043, 0.91), (0.801, 0.043, 0.91)),
        ((0.805, 0.036, 0.94), (0.799, 0.046, 0.91), (0.800, 0.046, 0.90)),
        ((0.805, 0.039, 0.95), (0.800, 0.049, 0.90), (0.801, 0.050, 0.89))),
    (CLAYTON, 0.2, 200): (
        ((0.200, 0.021, 0.97), (0.198, 0.022, 0.96), (0.196, 0.024, 0.90)),
        ((0.199, 0.024, 0.97), (0.197, 0.024, 0.97), (0.197, 0.025, 0.96)),
        ((0.200, 0.027, 0.99), (0.199, 0.027, 0.96), (0.198, 0.028, 0.94))),
    (CLAYTON, 0.5, 200): (
        ((0.498, 0.042, 0.96), (0.496, 0.050, 0.93), (0.487, 0.056, 0.87)),
        ((0.497, 0.045, 0.94), (0.495, 0.050, 0.94), (0.492, 0.055, 0.91)),
        ((0.494, 0.050, 0.92), (0.492, 0.053, 0.94), (0.490, 0.057, 0.90))),
    (CLAYTON, 1.0, 200): (
        ((1.002, 0.080, 0.95), (0.996, 0.100, 0.92), (0.956, 0.108, 0.85)),
        ((0.997, 0.083, 0.93), (0.993, 0.099, 0.94), (0.981, 0.106, 0.90)),
        ((0.998, 0.089, 0.95), (0.995, 0.101, 0.94), (0.986, 0.108, 0.92))),
    (CLAYTON, 1.5, 200): (
        ((1.482, 0.117, 0.94), (1.488, 0.150, 0.88), (1.408, 0.154, 0.82)),
        ((1.482, 0.120, 0.95), (1.490, 0.146, 0.88), (1.468, 0.157, 0.86)),
        ((1.491, 0.127, 0.95), (1.496, 0.149, 0.89), (1.481, 0.159, 0.89))),
    (GUMBEL, 0.2, 200): (
        ((0.195, 0.011, 0.84), (0.203, 0.012, 0.93), (0.218, 0.014, 0.77)),
        ((0.202, 0.011, 0.97), (0.204, 0.013, 0.95), (0.219, 0.031, 0.80)),
        ((0.203, 0.011, 0.97), (0.204, 0.014, 0.91), (0.222, 0.016, 0.77))),
    (GUMBEL, 0.5, 200): (
        ((0.504, 0.020, 0.96), (0.503, 0.024, 0.93), (0.508, 0.024, 0.94)),
        ((0.503, 0.020, 0.95), (0.502, 0.026, 0.93), (0.507, 0.026, 0.95)),
        ((0.503, 0.022, 0.98), (0.502, 0.028, 0.93), (0.507, 0.029, 0.94))),
    (GUMBEL, 0.8, 200): (
        ((0.802, 0.017, 0.92), (0.799, 0.023, 0.91), (0.799, 0.023, 0.92)),
        ((0.802, 0.018, 0.93), (0.798, 0.025, 0.92), (0.798, 0.025, 0.92)),
        ((0.801, 0.020, 0.96), (0.797, 0.027, 0.93), (0.797, 0.027, 0.92))),
}

PublishedCell = namedtuple('PublishedCell', 'mean se coverage')


class Scenario(namedtuple('Scenario', 'name family theta0 n_clusters censoring_percent')):
    __slots__ = ()

    @property
    def censoring(self):
        return CENSORING[self.censoring_percent]

    @property
    def published(self):
        """
        Published results per method, or an empty dict for cells outside the grid
        """
        try:
            row = _PUBLISHED[(self.family, self.theta0, self.n_clusters)]
        except KeyError:
            return {}
        cells = row[list(CENSORING).index(self.censoring_percent)]
        return OrderedDict((method, PublishedCell(*cell))
                           for method, cell in zip((ONE_STAGE, TWO_STAGE, SEMIPARAM), cells))


def scenario_name(family, theta0, n_clusters, censoring_percent):
    return '%s-%g-k%d-c%d' % (family, theta0, n_clusters, censoring_percent)


def _build():
    scenarios = OrderedDict()
    for family, thetas in THETAS.items():
        for theta0 in thetas:
            for n_clusters in CLUSTER_COUNTS:
                for percent in CENSORING:
                    name = scenario_name(family, theta0, n_clusters, percent)
                    scenarios[name] = Scenario(name, family, theta0, n_clusters, percent)
    return scenarios


SCENARIOS = _build()


def get_scenario(name):
    """
    :rtype: Scenario
    """
    try:
        return SCENARIOS[name]
    except KeyError:
        raise DomainError('Unknown scenario "%s"; valid names: %s' % (name, ', '.join(SCENARIOS)))
