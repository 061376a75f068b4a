from copulasurv.apps import CopulaSurvConfig


class CopulaSurvDemoConfig(CopulaSurvConfig):
    """
    Project-level overrides, also installed in replication workers
    """
    threads = 4
    jackknife_groups = 50
    default_seed = 2024
