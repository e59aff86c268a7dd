"""On-disk cache of resolution prefixes.

An entry stores the Betti numbers and generator images of a minimal free
resolution, keyed by a hash of the algebra and module data.  Entries are
written to a temporary file and renamed into place, so concurrent processes
never see a partial file.  On load, ``d^2 = 0`` and the augmentation are
re-checked; a corrupt entry is discarded and recomputed.
"""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np

from .modules import AModule
from .resolution import CACHE, FreeResolution

log = logging.getLogger(__name__)


def cache_key(M: AModule) -> str:
    return hashlib.sha256((M.algebra.fingerprint + M.fingerprint).encode()).hexdigest()


class DiskCache:
    def __init__(self, directory):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.warnings = []

    def path(self, M: AModule) -> Path:
        return self.dir / f"{cache_key(M)}.npz"

    def get(self, M: AModule) -> Optional[FreeResolution]:
        p = self.path(M)
        if not p.exists():
            return None
        try:
            res = self._load(M, p)
        except Exception as exc:  # corrupt or foreign entry
            msg = f"ignoring corrupt cache entry {p.name}: {exc}"
            log.warning(msg)
            self.warnings.append(msg)
            return None
        return res

    def _load(self, M: AModule, p: Path) -> FreeResolution:
        f = M.field
        with np.load(p, allow_pickle=False) as z:
            if str(z["key"]) != cache_key(M):
                raise ValueError("key mismatch")
            betti = [int(b) for b in z["betti"]]
            gens = []
            for i in range(len(betti)):
                g = z[f"g{i}"]
                if f.characteristic:
                    g = g.astype(np.int64)
                    if g.size and (g.min() < 0 or g.max() >= f.characteristic):
                        raise ValueError("entries out of range")
                else:
                    g = f.array(g.tolist()) if g.size else f.zeros(*g.shape)
                gens.append(np.ascontiguousarray(g))
        res = FreeResolution(M, betti, gens)
        d = M.algebra.dim
        for i, g in enumerate(gens):
            rows = M.dim if i == 0 else betti[i - 1] * d
            if g.shape != (rows, betti[i]):
                raise ValueError(f"shape mismatch at {i}")
        chk = res.check(exactness=False)
        if not (chk["d_squared_zero"] and chk["minimal"]):
            raise ValueError("stored differentials fail d^2 = 0 or minimality")
        if len(f.rref(res.kmatrix(0))[1]) != M.dim:
            raise ValueError("stored augmentation is not surjective")
        return res

    def put(self, res: FreeResolution) -> None:
        M = res.module
        arrays = {"key": np.array(cache_key(M)), "betti": np.array(res.betti, dtype=np.int64)}
        for i, g in enumerate(res.generators):
            arrays[f"g{i}"] = g if M.field.characteristic else np.array(g, dtype=str)
        fd, tmp = tempfile.mkstemp(dir=self.dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                np.savez_compressed(fh, **arrays)
            os.replace(tmp, self.path(M))
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)


def cached_resolution(M: AModule, length: int, disk: Optional[DiskCache] = None) -> FreeResolution:
    """Resolution to ``length``, reusing any stored prefix (memory first, then disk)."""
    loaded = -1
    if disk is not None and CACHE.known_length(M) < length:
        stored = disk.get(M)
        if stored is not None:
            loaded = stored.length
            if stored.length > CACHE.known_length(M):
                CACHE.put(stored)
    res = CACHE.get(M, length)
    if disk is not None and res.length > loaded:
        disk.put(res)
    return res.truncate(length) if res.length > length else res
