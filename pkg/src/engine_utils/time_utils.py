from functools import wraps
import time

from loguru import logger


def timeit(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.monotonic()
        try:
            return func(*args, **kwargs)
        finally:
            execution_time = time.monotonic() - start_time
            logger.debug(f"{func.__name__} finished in {execution_time:.3f}s")
    return wrapper
