class CopulaSurvError(Exception):
    """
    Base class of every error raised by copulasurv
    """


class DomainError(CopulaSurvError, ValueError):
    pass


class SingularPointError(DomainError):
    pass


class BoundaryError(DomainError):
    pass


class NumericalError(CopulaSurvError, ArithmeticError):
    pass


class UnderflowError(NumericalError):
    def __init__(self, message, subject_index=None, cluster_id=None):
        super(UnderflowError, self).__init__(message)
        self.subject_index = subject_index
        self.cluster_id = cluster_id

    def with_cluster(self, cluster_id):
        return UnderflowError('cluster %s: %s' % (cluster_id, self),
                              subject_index=self.subject_index, cluster_id=cluster_id)


class SingularityError(NumericalError):
    pass


class TableSizeError(CopulaSurvError):
    pass


class ConvergenceError(CopulaSurvError):
    def __init__(self, message, trace=None):
        super(ConvergenceError, self).__init__(message)
        self.trace = trace or []


class DivergenceError(ConvergenceError):
    pass


class IdentifiabilityError(CopulaSurvError):
    pass


class DataFormatError(CopulaSurvError):
    def __init__(self, message, line=None):
        if line is not None:
            message = 'line %d: %s' % (line, message)
        super(DataFormatError, self).__init__(message)
        self.line = line


class ReplicationError(CopulaSurvError):
    pass
