import logging
from typing import Optional, Union

from ..core.exceptions import ContractLabError, PreconditionError
from ..core.numeric import Number
from ..models import multiaction, multiagent
from ..models.multiaction import MultiActionInstance
from ..models.multiagent import MultiAgentInstance
from ..models.schemas import InstanceDocument, MultiActionSolutionDocument, MultiAgentSolutionDocument
from .instance_service import InstanceService

logger = logging.getLogger(__name__)

SolutionDocument = Union[MultiAgentSolutionDocument, MultiActionSolutionDocument]


class SolverService:
    """
    Service class to solve contract instances and render their solutions.
    """

    def __init__(self, instance_service: Optional[InstanceService] = None):
        self.instance_service = instance_service or InstanceService()

    def solve_instance(self, instance: Union[MultiAgentInstance, MultiActionInstance],
                       size_cap: Optional[int] = None,
                       ptas_epsilon: Optional[Number] = None,
                       metadata: Optional[dict] = None) -> SolutionDocument:
        """
        Solve a multi-agent or multi-action instance.

        Args:
            instance: the instance to solve
            size_cap: multi-agent only, restrict the search to |S| <= size_cap
            ptas_epsilon: multi-agent only, run the pseudo-symmetric PTAS instead of the exact search
            metadata: carried into the solution document

        Returns:
            SolutionDocument: the rendered optimum

        Raises:
            CapExceededError: if the instance is above the enumeration caps
            PreconditionError: if an option does not apply to the instance
        """
        try:
            if isinstance(instance, MultiActionInstance):
                if size_cap is not None or ptas_epsilon is not None:
                    raise PreconditionError("size_cap and ptas_epsilon apply to multi-agent instances only")
                solution = multiaction.solve_exact(instance)
                logger.info(f"Solved multi-action instance: alpha={solution.alpha}")
                return self.instance_service.multiaction_solution_document(solution, metadata)

            if ptas_epsilon is not None:
                solution = multiagent.solve_ptas_pseudosymmetric(instance, ptas_epsilon)
                method = "ptas"
            else:
                solution = multiagent.solve_exact(instance, size_cap=size_cap)
                method = "exact" if size_cap is None else "size-capped"
            logger.info(f"Solved multi-agent instance ({method}): g={solution.objective}")
            return self.instance_service.multiagent_solution_document(solution, method, metadata)

        except ContractLabError as e:
            logger.error(f"Error while solving: {str(e)}")
            raise

    def solve_document(self, document: InstanceDocument, **options) -> SolutionDocument:
        instance = self.instance_service.instance_from_document(document)
        return self.solve_instance(instance, metadata=document.metadata, **options)

    def solve_path(self, path: str, **options) -> SolutionDocument:
        instance, document = self.instance_service.read_instance(path)
        return self.solve_instance(instance, metadata=document.metadata, **options)
