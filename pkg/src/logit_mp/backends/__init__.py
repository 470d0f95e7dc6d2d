"""
Solver backends for logit-mp.

All LP and MIP solves in the package go through a SolverBackend. The backend
is chosen by name, or by the LOGIT_MP_BACKEND environment variable when no
name is given:

```python
from logit_mp.backends import get_backend, SolveParams

backend = get_backend()          # "highs" unless LOGIT_MP_BACKEND says otherwise
solution = backend.solve(model, SolveParams(time_limit_s=60))
print(solution.status, solution.objective)
```

Setting LOGIT_MP_DUMP_LP=<dir> writes every failed model to an LP file.
"""

import os
from typing import Callable, Dict, Optional

from ..constants import BACKEND_ENV_VAR, DEFAULT_BACKEND
from ..errors import InvalidInput
from .base import Capabilities, SolveParams, Solution, SolverBackend, SolveStatus
from .highs import HighsBackend

_REGISTRY: Dict[str, Callable[[], SolverBackend]] = {
    "highs": HighsBackend,
}


def get_backend(name: Optional[str] = None) -> SolverBackend:
    """
    Create a fresh backend handle.

    Raises:
        InvalidInput: If the backend name is unknown
    """
    name = (name or os.environ.get(BACKEND_ENV_VAR) or DEFAULT_BACKEND).lower()
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise InvalidInput(f"Unknown backend {name!r}; available: {sorted(_REGISTRY)}")


__all__ = [
    "Capabilities",
    "HighsBackend",
    "SolveParams",
    "Solution",
    "SolveStatus",
    "SolverBackend",
    "get_backend",
]
