from . import init
from . import history
from . import sweep
from . import dynamics
from . import optimize

__all__ = ["init", "history", "sweep", "dynamics", "optimize"]
