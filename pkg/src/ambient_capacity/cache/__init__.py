from .estimate_cache import EstimateCache, estimate_key

__all__ = ["EstimateCache", "estimate_key"]
