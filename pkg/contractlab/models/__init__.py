from .itemset import ItemSet
from .multiaction import MultiActionInstance, MultiActionSolution
from .multiagent import MultiAgentInstance, MultiAgentSolution, PseudoSymmetricSpec
from .setfn import AdditiveFn, CoverageFn, SetFunction, TableFn, XosFn, check_classes

__all__ = [
    "ItemSet",
    "MultiActionInstance",
    "MultiActionSolution",
    "MultiAgentInstance",
    "MultiAgentSolution",
    "PseudoSymmetricSpec",
    "AdditiveFn",
    "CoverageFn",
    "SetFunction",
    "TableFn",
    "XosFn",
    "check_classes",
]
