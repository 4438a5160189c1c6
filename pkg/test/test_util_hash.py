# Any copyright is dedicated to the public domain.
# http://creativecommons.org/publicdomain/zero/1.0/

from fplstat.util.hash import hash_object


def test_hash_object_ignores_key_order():
    assert hash_object({"a": 1, "b": [1, 2]}) == hash_object({"b": [1, 2], "a": 1})
    assert hash_object({"a": 1}) != hash_object({"a": 2})
    assert len(hash_object({"a": 1})) == 12
    assert len(hash_object({"a": 1}, length=64)) == 64
