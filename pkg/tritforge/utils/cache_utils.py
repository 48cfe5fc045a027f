"""
Caching Utilities
In-memory caches for gate constants and verified catalog entries.

Everything cached here is immutable, so cached objects are shared freely
between callers and threads.
"""
import logging
import threading
from typing import Any, Callable, Dict

from cachetools import LRUCache

from tritforge.utils.logging_config import PerformanceLogger

logger = logging.getLogger(__name__)
perf_logger = PerformanceLogger(logger)

# In-memory caches
gate_cache = LRUCache(maxsize=16)
catalog_cache = LRUCache(maxsize=128)

# cachetools caches are not thread-safe on their own
catalog_lock = threading.RLock()
gate_lock = threading.RLock()


def get_cache_key(cache_type: str, identifier: str) -> str:
    """Generate cache key"""
    return f"{cache_type}:{identifier}"


def get_entry_cached(identifier: str, build_func: Callable[[], Any]) -> Any:
    """
    Get a catalog entry with caching.

    Args:
        identifier: Entry key, e.g. "build:B1" or "n_controlled:4"
        build_func: Builds and verifies the entry on a cache miss

    Returns:
        The cached or freshly built entry
    """
    cache_key = get_cache_key("catalog", identifier)

    with catalog_lock:
        if cache_key in catalog_cache:
            perf_logger.log_cache_hit(cache_key)
            return catalog_cache[cache_key]

        # Cache miss - build under the lock so each entry is verified once
        perf_logger.log_cache_miss(cache_key)
        entry = build_func()
        catalog_cache[cache_key] = entry
        return entry


def clear_caches() -> None:
    """Drop every cached gate and catalog entry."""
    with catalog_lock:
        gate_cache.clear()
        catalog_cache.clear()
    logger.debug("Cleared gate and catalog caches")


def get_cache_stats() -> Dict[str, Any]:
    """Cache sizes for diagnostics."""
    return {
        "gate_cache": {"size": len(gate_cache), "maxsize": gate_cache.maxsize},
        "catalog_cache": {"size": len(catalog_cache), "maxsize": catalog_cache.maxsize},
    }
