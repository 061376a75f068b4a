"""
Ordered fan-out of independent work items over worker processes.

Results always come back in item order, so any reduction over them is the
same for every worker count. Workers get the parent's tunables installed
at start-up, whatever the multiprocessing start method.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat

import numpy as np

from copulasurv.config import config_snapshot, install_config
from copulasurv.exceptions import CopulaSurvError

logger = logging.getLogger(__name__)

# captured as Failure; anything else is a bug and propagates
CAPTURED_ERRORS = (CopulaSurvError, ArithmeticError, np.linalg.LinAlgError)


class Failure(object):
    """
    Captured exception of one work item
    """

    def __init__(self, index, error):
        self.index = index
        self.error = error

    def __repr__(self):
        return 'Failure(%d, %s)' % (self.index, self.message)

    @property
    def message(self):
        return '%s: %s' % (self.error.__class__.__name__, self.error)


def _call_captured(func, indexed_item):
    index, item = indexed_item
    try:
        return func(item)
    except CAPTURED_ERRORS as error:
        return Failure(index, error)


def ordered_map(func, items, threads=1, mp_context=None):
    """
    [func(item) for item in items], with numerical and domain errors returned
    as Failure instances. ``func`` and the items must be picklable when
    threads > 1.

    :type mp_context: multiprocessing context or None for the platform default
    """
    items = list(enumerate(items))
    if threads is None or threads <= 1 or len(items) <= 1:
        return [_call_captured(func, item) for item in items]
    workers = min(int(threads), len(items))
    logger.debug('Dispatching %d items to %d worker processes', len(items), workers)
    with ProcessPoolExecutor(max_workers=workers, mp_context=mp_context, initializer=install_config,
                             initargs=(config_snapshot(),)) as executor:
        return list(executor.map(_call_captured, repeat(func), items))
