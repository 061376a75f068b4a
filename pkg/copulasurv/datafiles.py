"""
CSV schema of clustered survival data::

    cluster,time,status,<covariate>,...

One row per subject; rows sharing a cluster value form one cluster.
"""
import logging
import re

import numpy as np
import pandas as pd

from copulasurv.config import get_config
from copulasurv.data import Dataset
from copulasurv.exceptions import DataFormatError, DomainError

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ('cluster', 'time', 'status')

_PARSER_LINE = re.compile(r'line (\d+)')


def _line(frame, row):
    # index keeps the data-row position before blank lines were dropped; header is line 1
    return int(frame.index[row]) + 2


def _numeric_column(frame, column):
    values = pd.to_numeric(frame[column], errors='coerce')
    bad = np.flatnonzero(values.isnull().to_numpy())
    if bad.size:
        row = int(bad[0])
        raise DataFormatError('column "%s": "%s" is not a number' % (column, frame[column].iloc[row]),
                              line=_line(frame, row))
    return values.to_numpy(dtype=float)


def read_frame(path):
    """
    Raw CSV as strings, with line-numbered format errors
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise DataFormatError('file is empty, expected a header "%s,..."' % ','.join(REQUIRED_COLUMNS), line=1)
    except pd.errors.ParserError as error:
        match = _PARSER_LINE.search(str(error))
        raise DataFormatError(str(error).strip(), line=int(match.group(1)) if match else None)
    columns = [str(column).strip() for column in frame.columns]
    if tuple(columns[:3]) != REQUIRED_COLUMNS:
        raise DataFormatError('header must start with "%s", got "%s"' %
                              (','.join(REQUIRED_COLUMNS), ','.join(columns)), line=1)
    if len(set(columns)) != len(columns):
        raise DataFormatError('duplicate column names in header', line=1)
    frame.columns = columns
    blank = (frame.fillna('').apply(lambda column: column.str.strip()) == '').all(axis=1).to_numpy()
    if blank.any():
        logger.debug('Skipping %d blank lines in %s', int(blank.sum()), path)
        frame = frame[~blank]
    if frame.empty:
        raise DataFormatError('no data rows', line=2)
    missing = frame.isnull().to_numpy() | (frame.to_numpy() == '')
    if missing.any():
        row, col = np.argwhere(missing)[0]
        raise DataFormatError('missing value in column "%s"' % columns[col], line=_line(frame, row))
    return frame


def frame_to_dataset(frame):
    """
    :type frame: pandas.DataFrame
    :rtype: Dataset
    """
    covariate_names = list(frame.columns[3:])
    times = _numeric_column(frame, 'time')
    bad = np.flatnonzero(~(times > 0.0) | ~np.isfinite(times))
    if bad.size:
        raise DataFormatError('time must be positive and finite, got "%s"' % frame['time'].iloc[bad[0]],
                              line=_line(frame, bad[0]))
    status_text = frame['status'].str.strip()
    bad = np.flatnonzero(~status_text.isin(['0', '1']).to_numpy())
    if bad.size:
        raise DataFormatError('status must be 0 or 1, got "%s"' % frame['status'].iloc[bad[0]],
                              line=_line(frame, bad[0]))
    status = status_text.astype(int).to_numpy()
    covariates = np.column_stack([_numeric_column(frame, name) for name in covariate_names]) \
        if covariate_names else np.zeros((len(frame), 0))
    bad = np.argwhere(~np.isfinite(covariates))
    if bad.size:
        row, col = bad[0]
        raise DataFormatError('covariate "%s" must be finite' % covariate_names[col], line=_line(frame, row))
    try:
        return Dataset.from_arrays(frame['cluster'].str.strip().to_numpy(), times, status, covariates,
                                   covariate_names)
    except DomainError as error:
        raise DataFormatError(str(error))


def read_dataset(path):
    """
    :rtype: Dataset
    """
    data = frame_to_dataset(read_frame(path))
    logger.info('Read %d clusters, %d subjects, %d events from %s',
                data.n_clusters, data.n_subjects, data.n_events, path)
    return data


def dataset_frame(data):
    """
    One row per subject, clusters in id order and subjects in canonical order
    """
    frame = pd.DataFrame(_columns(data))
    return frame[list(REQUIRED_COLUMNS) + list(data.covariate_names)]


def _columns(data):
    columns = {
        'cluster': [data.clusters[i].id for i in data.cluster_index],
        'time': data.times,
        'status': data.status,
    }
    for j, name in enumerate(data.covariate_names):
        columns[name] = data.covariates[:, j]
    return columns


def write_dataset(data, path):
    """
    Write a Dataset in the CSV schema with time_digits significant digits
    """
    frame = dataset_frame(data)
    frame.to_csv(path, index=False, float_format='%%.%dg' % get_config('time_digits'), lineterminator='\n')
    return frame
