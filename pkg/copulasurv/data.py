"""
Clustered right-censored observations (X_ij, delta_ij, Z_ij).

Clusters are kept sorted by id and subjects inside a cluster in a canonical
order, so every reduction over a Dataset runs in the same order whatever the
order the observations arrived in.
"""
from collections import namedtuple

import numpy as np

from copulasurv.exceptions import DataFormatError, DomainError


class Subject(namedtuple('Subject', 'time status covariates')):
    """
    :type time: float
    :type status: int
    :type covariates: tuple
    """
    __slots__ = ()

    def __new__(cls, time, status, covariates=()):
        time = float(time)
        if not time > 0.0 or not np.isfinite(time):
            raise DomainError('Observed time must be positive and finite, got %r' % time)
        status = int(status)
        if status not in (0, 1):
            raise DomainError('Status must be 0 or 1, got %r' % status)
        return super(Subject, cls).__new__(cls, time, status, tuple(float(z) for z in covariates))

    def _sort_key(self):
        return (self.time, self.status, self.covariates)


class Cluster(object):
    """
    A nonempty group of subjects sharing the copula
    """

    def __init__(self, id, subjects):
        subjects = tuple(subjects)
        if not subjects:
            raise DomainError('Cluster %s has no subjects' % id)
        self.id = str(id)
        self.subjects = subjects

    def __len__(self):
        return len(self.subjects)

    def __iter__(self):
        return iter(self.subjects)

    def __repr__(self):
        return 'Cluster(%r, n=%d, d=%d)' % (self.id, self.size, self.events)

    def __eq__(self, other):
        return isinstance(other, Cluster) and self.id == other.id and \
            self.canonical_subjects() == other.canonical_subjects()

    def __hash__(self):
        return hash(self.id)

    @property
    def size(self):
        return len(self.subjects)

    @property
    def events(self):
        return sum(subject.status for subject in self.subjects)

    def canonical_subjects(self):
        return tuple(sorted(self.subjects, key=Subject._sort_key))

    def arrays(self, n_covariates=None):
        """
        (times, status, covariates) in canonical subject order
        """
        subjects = self.canonical_subjects()
        if n_covariates is None:
            n_covariates = len(subjects[0].covariates)
        times = np.array([s.time for s in subjects], dtype=float)
        status = np.array([s.status for s in subjects], dtype=int)
        covariates = np.array([s.covariates for s in subjects], dtype=float).reshape(len(subjects), n_covariates)
        return times, status, covariates


def _cluster_sort_key(cluster):
    return cluster.id


class Dataset(object):
    """
    Clusters plus covariate names. Flat per-subject arrays are built once and
    shared read-only.

    :type clusters: list of Cluster
    :type covariate_names: list of str
    """

    def __init__(self, clusters, covariate_names=()):
        clusters = sorted(clusters, key=_cluster_sort_key)
        if not clusters:
            raise DomainError('Dataset has no clusters')
        covariate_names = tuple(str(name) for name in covariate_names)
        seen = set()
        for cluster in clusters:
            if cluster.id in seen:
                raise DataFormatError('Duplicate cluster id "%s"' % cluster.id)
            seen.add(cluster.id)
            for subject in cluster.subjects:
                if len(subject.covariates) != len(covariate_names):
                    raise DataFormatError('Cluster %s has a subject with %d covariates, expected %d' %
                                          (cluster.id, len(subject.covariates), len(covariate_names)))
        self.clusters = tuple(clusters)
        self.covariate_names = covariate_names
        self._build_arrays()

    def _build_arrays(self):
        p = len(self.covariate_names)
        times, status, covariates, index = [], [], [], []
        for i, cluster in enumerate(self.clusters):
            t, d, z = cluster.arrays(p)
            times.append(t)
            status.append(d)
            covariates.append(z)
            index.append(np.full(len(t), i, dtype=int))
        self.times = np.concatenate(times)
        self.status = np.concatenate(status)
        self.covariates = np.vstack(covariates).reshape(len(self.times), p)
        self.cluster_index = np.concatenate(index)
        self.cluster_sizes = np.bincount(self.cluster_index, minlength=len(self.clusters))
        self.cluster_events = np.bincount(self.cluster_index, weights=self.status,
                                          minlength=len(self.clusters)).astype(int)
        for array in (self.times, self.status, self.covariates, self.cluster_index,
                      self.cluster_sizes, self.cluster_events):
            array.setflags(write=False)

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def __eq__(self, other):
        return isinstance(other, Dataset) and self.covariate_names == other.covariate_names and \
            self.clusters == other.clusters

    def __repr__(self):
        return 'Dataset(K=%d, n=%d, events=%d, p=%d)' % (
            self.n_clusters, self.n_subjects, self.n_events, self.n_covariates)

    @property
    def n_clusters(self):
        return len(self.clusters)

    @property
    def n_subjects(self):
        return len(self.times)

    @property
    def n_events(self):
        return int(self.status.sum())

    @property
    def n_covariates(self):
        return len(self.covariate_names)

    @property
    def max_events(self):
        return int(self.cluster_events.max())

    @property
    def censoring_rate(self):
        return 1.0 - self.n_events / float(self.n_subjects)

    @property
    def cluster_ids(self):
        return [cluster.id for cluster in self.clusters]

    def subset(self, cluster_positions):
        """
        Dataset made of the clusters at the given positions
        """
        return Dataset([self.clusters[i] for i in cluster_positions], self.covariate_names)

    def without(self, cluster_positions):
        dropped = set(int(i) for i in cluster_positions)
        return self.subset([i for i in range(self.n_clusters) if i not in dropped])

    @classmethod
    def from_arrays(cls, cluster_ids, times, status, covariates=None, covariate_names=()):
        """
        Group flat per-subject arrays into clusters
        """
        times = np.asarray(times, dtype=float)
        n = len(times)
        if covariates is None:
            covariates = np.zeros((n, 0))
        covariates = np.asarray(covariates, dtype=float).reshape(n, -1)
        grouped = {}
        for cid, t, d, z in zip(cluster_ids, times, status, covariates):
            grouped.setdefault(str(cid), []).append(Subject(t, d, z))
        clusters = [Cluster(cid, subjects) for cid, subjects in grouped.items()]
        return cls(clusters, covariate_names)
