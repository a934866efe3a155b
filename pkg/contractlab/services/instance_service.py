import json
import logging
import os
from typing import Any, Dict, Optional, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ValidationError

from ..core.exceptions import InstanceParseError, StorageError
from ..core.numeric import Number, format_number, parse_number
from ..gadgets.clique import CliqueGadgetFn
from ..gadgets.hidden_set import HiddenSetFn
from ..gadgets.kprover import Formula3CNF5
from ..models.itemset import ItemSet
from ..models.multiaction import REAL, MultiActionInstance, MultiActionSolution
from ..models.multiagent import MultiAgentInstance, MultiAgentSolution, PseudoSymmetricFn, PseudoSymmetricSpec
from ..models.schemas import (
    AdditiveDocument,
    CliqueXosDocument,
    CoverageDocument,
    FormulaDocument,
    GraphDocument,
    HiddenSetDocument,
    InstanceDocument,
    MultiActionSolutionDocument,
    MultiAgentSolutionDocument,
    PseudoSymmetricDocument,
    TableDocument,
    XosDocument,
)
from ..models.setfn import AdditiveFn, CoverageFn, SetFunction, TableFn, XosFn
from ..utils.graphs import graph_edges, graph_from_edges

logger = logging.getLogger(__name__)

# Try to import Google Cloud Storage, but make it optional
try:
    from google.cloud import storage
    GCS_AVAILABLE = True
except ImportError:
    GCS_AVAILABLE = False
    storage = None

Instance = Union[MultiAgentInstance, MultiActionInstance]


class InstanceService:
    """
    Service class to read and write instance, graph, formula and solution documents.
    Supports both local file system and Google Cloud Storage (GCS).
    """

    def _is_gcs_path(self, path: str) -> bool:
        """
        Check if a path is a Google Cloud Storage path.

        Args:
            path: Path to check

        Returns:
            bool: True if path is a GCS path (starts with gs://)
        """
        return path.startswith("gs://")

    def _parse_gcs_path(self, gcs_path: str) -> Tuple[str, str]:
        """
        Parse a GCS path into bucket name and blob name.

        Args:
            gcs_path: GCS path in format gs://bucket/path/to/file

        Returns:
            tuple: (bucket_name, blob_name)

        Raises:
            StorageError: if the path has no bucket or no blob
        """
        if not self._is_gcs_path(gcs_path):
            raise StorageError(f"Not a GCS path: {gcs_path}")
        parts = gcs_path[5:].split("/", 1)
        if len(parts) < 2 or not parts[0] or not parts[1]:
            raise StorageError(f"Invalid GCS path format: {gcs_path}. Expected gs://bucket-name/path/to/file.json")
        return parts[0], parts[1]

    def _blob(self, path: str):
        if not GCS_AVAILABLE:
            logger.error("Google Cloud Storage library not available. Install with: pip install google-cloud-storage")
            raise StorageError(f"Cannot access {path}: google-cloud-storage is not installed")
        bucket_name, blob_name = self._parse_gcs_path(path)
        try:
            client = storage.Client()
        except Exception as auth_error:
            logger.error(f"Failed to initialize GCS client. Authentication error: {str(auth_error)}")
            logger.error("For local dev, run: gcloud auth application-default login")
            raise StorageError(f"Cannot access {path}: {auth_error}") from auth_error
        return client.bucket(bucket_name).blob(blob_name)

    def read_text(self, path: str) -> str:
        """
        Read a text document from disk or Google Cloud Storage.

        Raises:
            StorageError: if the document cannot be read
        """
        if self._is_gcs_path(path):
            blob = self._blob(path)
            try:
                if not blob.exists():
                    raise StorageError(f"Document not found in GCS: {path}")
                logger.info(f"Downloading document from GCS: {path}")
                return blob.download_as_bytes().decode("utf-8")
            except StorageError:
                raise
            except Exception as e:
                logger.error(f"Error reading from GCS: {str(e)}")
                raise StorageError(f"Failed to read {path}: {e}") from e
        if not os.path.exists(path):
            logger.error(f"Document not found at {path}")
            raise StorageError(f"Document not found at {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                return f.read()
        except OSError as e:
            logger.error(f"Error reading local path {path}: {str(e)}")
            raise StorageError(f"Failed to read {path}: {e}") from e

    def write_text(self, path: str, text: str, content_type: str = "application/json") -> None:
        """
        Write a text document to disk or Google Cloud Storage.

        Raises:
            StorageError: if the document cannot be written
        """
        if self._is_gcs_path(path):
            blob = self._blob(path)
            try:
                logger.info(f"Uploading document to GCS: {path}")
                blob.upload_from_string(text.encode("utf-8"), content_type=content_type)
                return
            except Exception as e:
                logger.error(f"Error writing to GCS: {str(e)}")
                raise StorageError(f"Failed to write {path}: {e}") from e
        try:
            # Create directory if it doesn't exist (only if path contains a directory)
            dir_path = os.path.dirname(path)
            if dir_path:
                os.makedirs(dir_path, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            logger.info(f"Wrote {path}")
        except OSError as e:
            logger.error(f"Error writing local path {path}: {str(e)}")
            raise StorageError(f"Failed to write {path}: {e}") from e

    @staticmethod
    def parse_json(text: str, source: str = "<document>") -> Dict[str, Any]:
        """JSON with floats kept as decimal strings, so 0.3 parses later as exactly 3/10."""
        try:
            return json.loads(text, parse_float=str)
        except json.JSONDecodeError as e:
            logger.error(f"Malformed JSON in {source}: {str(e)}")
            raise InstanceParseError(f"Malformed JSON in {source}: {e}") from e

    @staticmethod
    def dump_json(document: Union[BaseModel, Dict[str, Any]]) -> str:
        payload = document.model_dump(mode="json") if isinstance(document, BaseModel) else document
        return json.dumps(payload, indent=2) + "\n"

    def _validated(self, model, payload: Dict[str, Any], source: str):
        try:
            return model.model_validate(payload)
        except ValidationError as e:
            logger.error(f"Invalid document {source}: {str(e)}")
            raise InstanceParseError(f"Invalid document {source}: {e}") from e

    def read_instance_document(self, path: str) -> InstanceDocument:
        return self._validated(InstanceDocument, self.parse_json(self.read_text(path), path), path)

    def read_graph(self, path: str) -> nx.Graph:
        document = self._validated(GraphDocument, self.parse_json(self.read_text(path), path), path)
        return self.graph_from_document(document)

    def read_formula(self, path: str) -> Formula3CNF5:
        document = self._validated(FormulaDocument, self.parse_json(self.read_text(path), path), path)
        return Formula3CNF5(n_vars=document.n_vars, clauses=tuple(tuple(c) for c in document.clauses))

    def write_document(self, path: Optional[str], document: Union[BaseModel, Dict[str, Any]]) -> str:
        """Serialize a document; write it when a path is given. Returns the JSON text."""
        text = self.dump_json(document)
        if path:
            self.write_text(path, text)
        return text

    # Conversions between documents and domain objects

    @staticmethod
    def graph_from_document(document: GraphDocument) -> nx.Graph:
        return graph_from_edges(document.vertices, document.edges)

    @staticmethod
    def graph_to_document(graph: nx.Graph) -> GraphDocument:
        return GraphDocument(vertices=graph.number_of_nodes(), edges=graph_edges(graph))

    @staticmethod
    def formula_to_document(formula: Formula3CNF5) -> FormulaDocument:
        return FormulaDocument(n_vars=formula.n_vars, clauses=[list(c) for c in formula.clauses])

    def function_from_document(self, document, exact: bool = True) -> SetFunction:
        """Build the SetFunction a document describes; numbers parse as Fractions when exact."""

        def num(value) -> Number:
            return parse_number(value, exact=exact)

        scale = num(document.normalize_by)
        if isinstance(document, AdditiveDocument):
            return AdditiveFn([num(w) for w in document.weights], normalize_by=scale)
        if isinstance(document, CoverageDocument):
            lists = [[u - 1 for u in elements] for elements in document.covers]
            return CoverageFn.from_element_lists(document.universe_size, lists, normalize_by=scale)
        if isinstance(document, XosDocument):
            return XosFn([[num(a) for a in clause] for clause in document.clauses], normalize_by=scale)
        if isinstance(document, TableDocument):
            empty = None if document.empty_value is None else num(document.empty_value)
            return TableFn([num(v) for v in document.values], empty_value=empty, normalize_by=scale)
        if isinstance(document, HiddenSetDocument):
            good = ItemSet.from_one_based(document.good, document.n)
            return HiddenSetFn(document.n, good, normalize_by=scale)
        if isinstance(document, CliqueXosDocument):
            graph = self.graph_from_document(document.graph)
            return CliqueGadgetFn(graph, document.delta, parse_number(document.beta), normalize_by=scale)
        if isinstance(document, PseudoSymmetricDocument):
            n = len(document.profile) - 1
            spec = PseudoSymmetricSpec(
                profile=tuple(num(h) for h in document.profile),
                special_set=ItemSet.from_one_based(document.special_set, n),
                bonus=num(document.bonus),
            )
            return PseudoSymmetricFn(spec.profile, spec.special_set, spec.bonus, normalize_by=scale)
        raise InstanceParseError(f"Unsupported set function document: {type(document).__name__}")

    def function_to_document(self, f: SetFunction):
        scale = format_number(f.normalize_by)
        if isinstance(f, AdditiveFn):
            return AdditiveDocument(weights=[format_number(w) for w in f.weights], normalize_by=scale)
        if isinstance(f, CoverageFn):
            covers = [[u + 1 for u in elements] for elements in f.element_lists()]
            return CoverageDocument(universe_size=f.universe_size, covers=covers, normalize_by=scale)
        if isinstance(f, XosFn):
            clauses = [[format_number(a) for a in clause] for clause in f.clauses]
            return XosDocument(clauses=clauses, normalize_by=scale)
        if isinstance(f, TableFn):
            return TableDocument(values=[format_number(v) for v in f.values], normalize_by=scale)
        if isinstance(f, HiddenSetFn):
            return HiddenSetDocument(n=f.n, good=f.good.one_based(), normalize_by=scale)
        if isinstance(f, CliqueGadgetFn):
            base = f.graph.subgraph(range(f.base_vertices))
            return CliqueXosDocument(graph=self.graph_to_document(base), delta=f.delta,
                                     beta=format_number(f.beta), normalize_by=scale)
        if isinstance(f, PseudoSymmetricFn):
            return PseudoSymmetricDocument(profile=[format_number(h) for h in f.profile],
                                           special_set=f.special_set.one_based(),
                                           bonus=format_number(f.bonus), normalize_by=scale)
        raise InstanceParseError(f"No document form for {type(f).__name__}")

    def instance_from_document(self, document: InstanceDocument) -> Instance:
        exact = document.numeric != REAL
        f = self.function_from_document(document.f, exact=exact)
        costs = tuple(parse_number(c, exact=exact) for c in document.costs)
        if document.model == "multi-agent":
            return MultiAgentInstance(costs=costs, f=f)
        return MultiActionInstance(costs=costs, f=f, numeric=document.numeric)

    def instance_to_document(self, instance: Instance, metadata: Optional[Dict[str, Any]] = None) -> InstanceDocument:
        if isinstance(instance, MultiActionInstance):
            model, numeric = "multi-action", instance.numeric
        else:
            model, numeric = "multi-agent", "rational" if instance.exact else "real"
        return InstanceDocument(
            model=model,
            numeric=numeric,
            costs=[format_number(c) for c in instance.costs],
            f=self.function_to_document(instance.f),
            metadata=metadata or {},
        )

    def read_instance(self, path: str) -> Tuple[Instance, InstanceDocument]:
        """
        Load an instance file from disk or GCS.

        Returns:
            Tuple of the domain instance and the validated document

        Raises:
            StorageError: if the file cannot be read
            InstanceParseError: if the JSON is malformed or fails validation
        """
        document = self.read_instance_document(path)
        instance = self.instance_from_document(document)
        logger.info(f"Loaded {document.model} instance with {instance.n} items from {path}")
        return instance, document

    # Solutions

    @staticmethod
    def multiagent_solution_document(solution: MultiAgentSolution, method: str = "exact",
                                     metadata: Optional[Dict[str, Any]] = None) -> MultiAgentSolutionDocument:
        return MultiAgentSolutionDocument(
            S=solution.S.one_based(),
            payments=[format_number(a) for a in solution.payments],
            objective=format_number(solution.objective),
            objective_value=float(solution.objective),
            method=method,
            metadata=metadata or {},
        )

    @staticmethod
    def multiaction_solution_document(solution: MultiActionSolution,
                                      metadata: Optional[Dict[str, Any]] = None) -> MultiActionSolutionDocument:
        return MultiActionSolutionDocument(
            alpha=format_number(solution.alpha),
            alpha_value=float(solution.alpha),
            best_response=solution.best_response.one_based(),
            principal_utility=format_number(solution.principal_utility),
            principal_utility_value=float(solution.principal_utility),
            metadata=metadata or {},
        )
