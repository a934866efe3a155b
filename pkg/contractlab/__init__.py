"""Exact desk-scale solvers and reduction gadgets for linear contract design."""
from .config.settings import settings
from .models.itemset import ItemSet
from .models.multiaction import MultiActionInstance
from .models.multiagent import MultiAgentInstance

__version__ = settings.app_version

__all__ = ["ItemSet", "MultiActionInstance", "MultiAgentInstance", "__version__"]
