import json
import os
import tempfile
import unittest
from fractions import Fraction

import networkx as nx
from mockito import ANY, mock, unstub, verify, when

from contractlab.core.exceptions import InstanceParseError, StorageError
from contractlab.gadgets.clique import CliqueGadgetFn, clique_xos_instance
from contractlab.gadgets.hidden_set import hidden_set_instance
from contractlab.gadgets.pseudosymmetric import pseudosymmetric_instance
from contractlab.models.itemset import ItemSet
from contractlab.models.multiaction import MultiActionInstance
from contractlab.models.multiagent import MultiAgentInstance
from contractlab.models.setfn import AdditiveFn, CoverageFn, XosFn
from contractlab.services import instance_service as instance_module
from contractlab.services.instance_service import GCS_AVAILABLE, InstanceService


class TestInstanceDocuments(unittest.TestCase):

    def setUp(self) -> None:
        super().setUp()
        self.service = InstanceService()

    def _parse(self, payload: dict):
        return self.service.instance_from_document(
            self.service._validated(instance_module.InstanceDocument,
                                    self.service.parse_json(json.dumps(payload)), "<test>")
        )

    def test_decimals_parse_exactly(self):
        instance = self._parse({
            "model": "multi-agent",
            "costs": [0.06, 0.1],
            "f": {"kind": "additive", "weights": [0.3, 0.5]},
        })
        assert isinstance(instance, MultiAgentInstance)
        assert instance.costs == (Fraction(3, 50), Fraction(1, 10))
        assert instance.f.weights == (Fraction(3, 10), Fraction(1, 2))

    def test_real_mode_uses_floats(self):
        instance = self._parse({
            "model": "multi-action",
            "numeric": "real",
            "costs": [0.1],
            "f": {"kind": "xos", "clauses": [[0.4], ["1/3"]]},
        })
        assert isinstance(instance, MultiActionInstance)
        assert not instance.exact
        assert isinstance(instance.costs[0], float)

    def test_coverage_lists_are_one_based(self):
        instance = self._parse({
            "model": "multi-agent",
            "costs": [0, 0],
            "f": {"kind": "coverage", "universe_size": 2, "covers": [[1], [1, 2]]},
        })
        assert instance.f.value(ItemSet.from_one_based([1], 2)) == Fraction(1, 2)

    def test_invalid_documents(self):
        with self.assertRaises(InstanceParseError):
            self.service.parse_json("{not json")
        with self.assertRaises(InstanceParseError):
            self._parse({"model": "single-agent", "costs": [0], "f": {"kind": "additive", "weights": [1]}})
        with self.assertRaises(InstanceParseError):
            self._parse({"model": "multi-agent", "costs": [0],
                         "f": {"kind": "coverage", "universe_size": 1, "covers": [[2]]}})
        with self.assertRaises(InstanceParseError):
            self._parse({"model": "multi-agent", "costs": ["abc"], "f": {"kind": "additive", "weights": [1]}})

    def test_documents_rebuild_the_same_functions(self):
        instances = [
            MultiAgentInstance(costs=(Fraction(1, 3), 0), f=AdditiveFn([Fraction(1, 2), Fraction(1, 4)])),
            MultiAgentInstance(costs=(0, 0), f=CoverageFn.from_element_lists(3, [[0], [1, 2]])),
            MultiActionInstance(costs=(Fraction(1, 5),), f=XosFn([[Fraction(1, 2)], [Fraction(2, 3)]])),
            hidden_set_instance(27, seed=3),
            clique_xos_instance(nx.cycle_graph(4), 2, Fraction(1, 2), normalize=True)[0],
            pseudosymmetric_instance(5, seed=4),
        ]
        for instance in instances:
            document = self.service.instance_to_document(instance, {"source": "test"})
            text = self.service.dump_json(document)
            rebuilt = self._parse(json.loads(text))
            assert type(rebuilt.f) is type(instance.f)
            assert rebuilt.costs == instance.costs
            for bits in range(1 << instance.n):
                assert rebuilt.f.value_bits(bits) == instance.f.value_bits(bits)

    def test_clique_document_keeps_the_base_graph(self):
        _, gadget = clique_xos_instance(nx.path_graph(3), 1, Fraction(1, 2))
        document = self.service.function_to_document(gadget)
        assert document.graph.vertices == 3
        assert document.graph.edges == [[1, 2], [2, 3]]
        assert isinstance(self.service.function_from_document(document), CliqueGadgetFn)


class TestLocalStorage(unittest.TestCase):

    def test_write_and_read(self):
        service = InstanceService()
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "nested", "graph.json")
            service.write_document(path, service.graph_to_document(nx.complete_graph(3)))
            graph = service.read_graph(path)
        assert graph.number_of_edges() == 3

    def test_missing_file(self):
        with self.assertRaises(StorageError):
            InstanceService().read_text("/nonexistent/instance.json")

    def test_write_document_without_path_only_renders(self):
        text = InstanceService().write_document(None, {"a": 1})
        assert json.loads(text) == {"a": 1}

    def test_bad_gcs_path(self):
        with self.assertRaises(StorageError):
            InstanceService()._parse_gcs_path("gs://bucket-only")


@unittest.skipUnless(GCS_AVAILABLE, "google-cloud-storage is not installed")
class TestGcsStorage(unittest.TestCase):

    def setUp(self) -> None:
        super().setUp()
        self.client = mock()
        self.bucket = mock()
        self.blob = mock()
        when(instance_module.storage).Client().thenReturn(self.client)
        when(self.client).bucket("runs").thenReturn(self.bucket)
        when(self.bucket).blob("graphs/tri.json").thenReturn(self.blob)

    def tearDown(self) -> None:
        unstub()
        super().tearDown()

    def test_read_from_bucket(self):
        payload = json.dumps({"vertices": 3, "edges": [[1, 2], [2, 3], [1, 3]]}).encode("utf-8")
        when(self.blob).exists().thenReturn(True)
        when(self.blob).download_as_bytes().thenReturn(payload)
        graph = InstanceService().read_graph("gs://runs/graphs/tri.json")
        assert graph.number_of_edges() == 3

    def test_missing_blob(self):
        when(self.blob).exists().thenReturn(False)
        with self.assertRaises(StorageError):
            InstanceService().read_text("gs://runs/graphs/tri.json")

    def test_upload(self):
        when(self.blob).upload_from_string(ANY, content_type=ANY).thenReturn(None)
        InstanceService().write_text("gs://runs/graphs/tri.json", "{}", content_type="application/json")
        verify(self.blob).upload_from_string(b"{}", content_type="application/json")
