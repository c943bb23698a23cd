"""
On-disk cache of sieve segments.

File layout (little-endian): header {magic "KFDL", version u32, lo u64,
hi u64, k u32 (0 = absent)} followed by the arrays d (i4), mu (i1) and,
when k is present, dk (i4) and d11k (i4).
"""

import logging
import os
import struct
from typing import Optional

import numpy as np

from app.constants import CACHE_MAGIC, CACHE_VERSION, CACHE_HEADER_FORMAT
from app.models import SieveRange, SieveTable

logger = logging.getLogger(__name__)

HEADER_SIZE = struct.calcsize(CACHE_HEADER_FORMAT)


class SieveCache:
    """Service class for reading and writing cached sieve segments."""

    def __init__(self, cache_dir: str):
        self.cache_dir = cache_dir

    def __repr__(self) -> str:
        return f"<SieveCache(cache_dir={self.cache_dir})>"

    def path_for(self, sieve_range: SieveRange, k: Optional[int]) -> str:
        """File name of one segment."""
        return os.path.join(self.cache_dir, f"seg_{sieve_range.lo}_{sieve_range.hi}_k{k or 0}.bin")

    def load(self, sieve_range: SieveRange, k: Optional[int]) -> Optional[SieveTable]:
        """
        Read a cached segment.

        Args:
            sieve_range: Range the caller wants
            k: Requested k (None when only d and mu are wanted)

        Returns:
            The cached table, or None when absent or unreadable
        """
        path = self.path_for(sieve_range, k)
        if not os.path.exists(path):
            return None

        try:
            with open(path, 'rb') as handle:
                payload = handle.read()
            return self._decode(payload, sieve_range, k)
        except (ValueError, struct.error) as e:
            logger.warning(f"Discarding corrupt cache segment {path}: {e}")
            return None
        except OSError as e:
            logger.warning(f"Cannot read cache segment {path}, recomputing: {e}")
            return None

    def store(self, table: SieveTable) -> None:
        """Write a segment, replacing any previous file atomically."""
        os.makedirs(self.cache_dir, exist_ok = True)
        path = self.path_for(table.range, table.k)
        header = struct.pack(CACHE_HEADER_FORMAT, CACHE_MAGIC, CACHE_VERSION,
                             table.range.lo, table.range.hi, table.k or 0)
        parts = [header, table.d.astype('<i4').tobytes(), table.mu.astype('<i1').tobytes()]
        if table.k:
            parts.append(table.dk.astype('<i4').tobytes())
            parts.append(table.d11k.astype('<i4').tobytes())

        temp_path = f"{path}.tmp"
        try:
            with open(temp_path, 'wb') as handle:
                handle.write(b''.join(parts))
            os.replace(temp_path, path)
        except OSError as e:
            logger.warning(f"Cannot write cache segment {path}, continuing without it: {e}")
            if os.path.exists(temp_path):
                os.remove(temp_path)
            return
        logger.debug(f"Cached segment {table.range!r} at {path}")

    @staticmethod
    def _decode(payload: bytes, sieve_range: SieveRange, k: Optional[int]) -> SieveTable:
        if len(payload) < HEADER_SIZE:
            raise ValueError("file shorter than header")

        magic, version, lo, hi, stored_k = struct.unpack_from(CACHE_HEADER_FORMAT, payload)
        if magic != CACHE_MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        if version != CACHE_VERSION:
            raise ValueError(f"unsupported version {version}")
        if (lo, hi, stored_k) != (sieve_range.lo, sieve_range.hi, k or 0):
            raise ValueError(f"header describes [{lo}, {hi}) k={stored_k}")

        size = hi - lo
        expected = HEADER_SIZE + size * (4 + 1 + (8 if stored_k else 0))
        if len(payload) != expected:
            raise ValueError(f"expected {expected} bytes, found {len(payload)}")

        offset = HEADER_SIZE
        d = np.frombuffer(payload, dtype = '<i4', count = size, offset = offset).astype(np.int32)
        offset += 4 * size
        mu = np.frombuffer(payload, dtype = '<i1', count = size, offset = offset).astype(np.int8)
        offset += size
        dk = d11k = None
        if stored_k:
            dk = np.frombuffer(payload, dtype = '<i4', count = size, offset = offset).astype(np.int32)
            offset += 4 * size
            d11k = np.frombuffer(payload, dtype = '<i4', count = size, offset = offset).astype(np.int32)

        return SieveTable(range = sieve_range, d = d, mu = mu, dk = dk, d11k = d11k, k = k)
