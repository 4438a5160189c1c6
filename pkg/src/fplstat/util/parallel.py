# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

import logging
from concurrent.futures import ProcessPoolExecutor

logger = logging.getLogger(__name__)


def ordered_map(func, items, max_workers=None):
    """Apply ``func`` to every item, in worker processes when ``max_workers``
    allows it, and return the results in input order.

    ``func`` and the items must be picklable. Exceptions raised by ``func``
    propagate from the first failing item in input order.
    """
    items = list(items)
    # Don't bother with a pool for a single item or a single worker. This keeps
    # tracebacks readable and avoids process overhead.
    if len(items) <= 1 or max_workers == 1:
        return [func(item) for item in items]

    futures = {}
    with ProcessPoolExecutor(max_workers=max_workers) as executor:
        for index, item in enumerate(items):
            futures[index] = executor.submit(func, item)
        logger.debug(f"submitted {len(futures)} jobs to the process pool")
        return [futures[index].result() for index in range(len(items))]
