# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.


class FplstatError(Exception):
    """Base class for all errors raised by fplstat."""


class DomainError(FplstatError, ValueError):
    """Raised when an input lies outside the domain of an operation."""


class ResourceGuardError(FplstatError, RuntimeError):
    """Raised when exact enumeration would exceed ``ENUMERATION_GUARD``."""


class PlanValidationError(FplstatError):
    """Raised when an experiment plan has invalid, extra or missing fields."""
