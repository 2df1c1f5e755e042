"""Reference evaluator child for the line-delimited JSON protocol.

The parent search process drives this adapter over stdin/stdout: a hello
handshake, then one eval request at a time, answered with measured results
(`replay` mode, from a results CSV) or by calling a user-supplied benchmark
hook (`live` mode). The serve loop never crashes on bad input; anything it
cannot answer becomes a well-formed error response.
"""

from .dataset import DatasetError, load_dataset
from .server import AdapterConfig, serve

__version__ = "0.1.0"

__all__ = ["AdapterConfig", "serve", "load_dataset", "DatasetError", "__version__"]
