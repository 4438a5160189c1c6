# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.


import collections.abc
import pprint
import re

import voluptuous

from ..errors import PlanValidationError

IDENTIFIER_RE = re.compile(r"^[a-z][a-z0-9-]*$")


def validate_schema(schema, obj, msg_prefix):
    """
    Validate that object satisfies schema and return the validated (coerced)
    object. If not, raise a PlanValidationError listing every problem,
    beginning with msg_prefix.
    """
    try:
        return schema(obj)
    except voluptuous.MultipleInvalid as exc:
        msg = [msg_prefix]
        for error in exc.errors:
            msg.append(str(error))
        raise PlanValidationError("\n".join(msg) + "\n" + pprint.pformat(obj))


def check_schema(schema):
    """Plan files use dashed lower-case keys; reject schemas that don't."""

    def check_key(path, key):
        if isinstance(key, (voluptuous.Optional, voluptuous.Required)):
            key = key.schema
        if isinstance(key, str) and not IDENTIFIER_RE.match(key):
            raise RuntimeError(
                f"plan schemas should use dashed lower-case identifiers, not {key!r} @ {path}"
            )

    def walk(path, sch):
        if isinstance(sch, collections.abc.Mapping):
            for k, v in sch.items():
                child = f"{path}[{k!r}]"
                check_key(child, k)
                walk(child, v)
        elif isinstance(sch, (list, tuple)):
            for i, v in enumerate(sch):
                walk(f"{path}[{i}]", v)

    walk("schema", schema.schema)


class Schema(voluptuous.Schema):
    """A voluptuous.Schema whose keys are checked when it is built."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        check_schema(self)
