# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

__version__ = "0.3.0"

# Populations up to this size use exact big-integer binomials; larger ones are
# evaluated in log space.
EXACT_THRESHOLD = 200

# Maximum number of subsamples the oracle will evaluate before giving up.
ENUMERATION_GUARD = 10**7
