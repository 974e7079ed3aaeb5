"""Deterministic, splittable random streams.

Every randomized step draws from a stream keyed by the master seed plus a
label path (e.g. ("job-delay", job_id)). Streams are independent of how
many other streams exist, so adding a job or a group never perturbs the
draws of the others. hashlib is used instead of hash() because the latter
is salted per process.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(*parts: object) -> int:
    digest = hashlib.sha256(repr(tuple(parts)).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(*parts: object) -> random.Random:
    return random.Random(derive_seed(*parts))
