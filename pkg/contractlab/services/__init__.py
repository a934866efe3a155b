from .clique_service import CliqueService, CliqueVerdict, ContractOracle, degraded_oracle, exact_oracle
from .estimation_service import EstimationService
from .instance_service import InstanceService
from .solver_service import SolverService
from .verification_service import SuiteSizes, VerificationService

__all__ = [
    "CliqueService",
    "CliqueVerdict",
    "ContractOracle",
    "degraded_oracle",
    "exact_oracle",
    "EstimationService",
    "InstanceService",
    "SolverService",
    "SuiteSizes",
    "VerificationService",
]
