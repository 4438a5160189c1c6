# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""Readers for the plain-text and YAML input files."""

import math

try:
    from yaml import CSafeLoader as SafeLoader
except ImportError:
    from yaml import SafeLoader

from ..errors import DomainError, PlanValidationError


def _content_lines(stream):
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_values(stream, name="<stream>"):
    """Parse one finite decimal value per line, skipping blank lines and lines
    starting with ``#``."""
    values = []
    for lineno, line in _content_lines(stream):
        try:
            value = float(line)
        except ValueError:
            raise DomainError(f"{name}:{lineno}: not a number: {line!r}")
        if not math.isfinite(value):
            raise DomainError(f"{name}:{lineno}: value must be finite, got {line!r}")
        values.append(value)
    return values


def read_values(path):
    with open(path) as fh:
        return parse_values(fh, name=str(path))


def parse_key_values(stream, name="<stream>"):
    """Parse ``key = value`` lines into a dict of strings. Values stay raw; the
    plan schema is responsible for coercion."""
    result = {}
    for lineno, line in _content_lines(stream):
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise PlanValidationError(f"{name}:{lineno}: expected `key = value`, got {line!r}")
        if key in result:
            raise PlanValidationError(f"{name}:{lineno}: duplicate key {key!r}")
        result[key] = value.strip()
    return result


def load_stream(stream):
    """Parse the first YAML document in a stream."""
    loader = SafeLoader(stream)
    try:
        return loader.get_single_data()
    finally:
        loader.dispose()


def load_mapping(path):
    """Load a plan-like mapping from a YAML file (``.yml``/``.yaml``) or a
    ``key = value`` text file."""
    path = str(path)
    if path.endswith((".yml", ".yaml")):
        with open(path, "rb") as fh:
            data = load_stream(fh)
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise PlanValidationError(f"{path}: expected a mapping at the top level")
        return data
    with open(path) as fh:
        return parse_key_values(fh, name=path)
