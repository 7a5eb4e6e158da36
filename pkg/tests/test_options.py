"""Tests for configuration objects, spec files and the CSV/JSON readers and writers."""

import io
import json
import shutil
import tempfile
import unittest
from pathlib import Path

import numpy as np

from copmix.copulas import (
    ArchimedeanGenerator,
    ClaytonCopula,
    ExampleCopula,
    GaussianCopula,
    IndependenceCopula,
)
from copmix.core.errors import DimensionError, ValidationError
from copmix.io.input import (
    diagnostics_config_from_mapping,
    experiment_spec_from_mapping,
    fit_config_from_mapping,
    load_copula_spec,
    load_model,
    parse_key_values,
    read_matrix,
)
from copmix.io.output import format_float, write_csv, write_csv_stream, write_json
from copmix.mixture import CovarianceMode, GaussianMixtureModel, QRDensity
from copmix.options import (
    CopulaSpec,
    DiagnosticsConfig,
    ExperimentSpec,
    FitConfig,
    MarginalMixtureSpec,
)
from copmix.transforms import MarginalTransform


class TestFitConfig(unittest.TestCase):
    def test_defaults(self):
        config = FitConfig()
        self.assertEqual(config.candidates, (2, 3, 4, 5))
        self.assertIs(config.covariance_mode, CovarianceMode.FULL)
        self.assertEqual(config.reg_floor, 1e-6)
        self.assertEqual(config.tol, 1e-8)

    def test_normalizes_values(self):
        config = FitConfig(candidates=(4, 2, 2), covariance_mode="Spherical", transform="LOGISTIC")
        self.assertEqual(config.candidates, (2, 4))
        self.assertIs(config.covariance_mode, CovarianceMode.SPHERICAL)
        self.assertEqual(config.transform, "logistic")

    def test_rejects_invalid_values(self):
        bad = [
            {"candidates": ()},
            {"candidates": (0, 2)},
            {"max_iter": 0},
            {"tol": 0.0},
            {"reg_floor": -1.0},
            {"restarts": 0},
            {"seed": -1},
            {"transform": "cauchy"},
            {"marginals": "kernel"},
            {"covariance_mode": "diagonal"},
        ]
        for kwargs in bad:
            with self.subTest(**{k: str(v) for k, v in kwargs.items()}):
                with self.assertRaises(ValidationError):
                    FitConfig(**kwargs)

    def test_export_dict_is_json_ready(self):
        exported = FitConfig(candidates=(1, 3)).to_export_dict()
        self.assertEqual(exported["candidates"], [1, 3])
        self.assertEqual(exported["covariance_mode"], "full")
        json.dumps(exported)


class TestCopulaSpec(unittest.TestCase):
    def test_builds_each_family(self):
        self.assertIsInstance(CopulaSpec().build(), ExampleCopula)
        self.assertIsInstance(CopulaSpec("independence", 3).build(), IndependenceCopula)
        self.assertIsInstance(CopulaSpec("clayton", theta=2.0).build(), ClaytonCopula)
        generator = CopulaSpec("clayton", theta=2.0, finite_difference=True).build()
        self.assertIsInstance(generator, ArchimedeanGenerator)
        for family, theta in (("amh", 0.5), ("gumbel", 2.0), ("frank", 4.0)):
            self.assertIsInstance(CopulaSpec(family, theta=theta).build(), ArchimedeanGenerator)
        gaussian = CopulaSpec("gaussian", correlation=(1.0, 0.3, 0.3, 1.0)).build()
        self.assertIsInstance(gaussian, GaussianCopula)
        self.assertEqual(gaussian.corr.matrix[0, 1], 0.3)

    def test_rejects_invalid_specs(self):
        with self.assertRaises(ValidationError):
            CopulaSpec("student")
        with self.assertRaises(ValidationError):
            CopulaSpec("example", dimension=3)
        with self.assertRaises(ValidationError):
            CopulaSpec("gaussian", correlation=(1.0, 0.3))
        with self.assertRaises(ValidationError):
            CopulaSpec("amh", theta=1.5)

    def test_export_dict_names_only_used_parameters(self):
        self.assertEqual(CopulaSpec("independence").to_export_dict(), {"family": "independence", "dimension": 2})
        self.assertEqual(CopulaSpec().to_export_dict()["alpha"], 0.75)


class TestExperimentSpec(unittest.TestCase):
    def test_default_marginals_are_six_bumps(self):
        spec = ExperimentSpec()
        self.assertEqual(len(spec.marginals), 2)
        marginal = spec.marginals[0].build()
        self.assertEqual(marginal.means, (-9.0, -5.4, -1.8, 1.8, 5.4, 9.0))

    def test_single_marginal_is_broadcast(self):
        spec = ExperimentSpec(
            copula=CopulaSpec("independence", 3), marginals=(MarginalMixtureSpec((0.0,), (1.0,)),)
        )
        self.assertEqual(len(spec.marginals), 3)

    def test_rejects_invalid_values(self):
        with self.assertRaises(ValidationError):
            ExperimentSpec(n=50)
        with self.assertRaises(ValidationError):
            ExperimentSpec(grid_per_dim=4)
        with self.assertRaises(ValidationError):
            ExperimentSpec(marginals=(MarginalMixtureSpec(),) * 3)
        with self.assertRaises(ValidationError):
            MarginalMixtureSpec((0.0, 1.0), (1.0,), (0.5, 0.7))


class TestDiagnosticsConfig(unittest.TestCase):
    def test_witnesses_must_be_interior(self):
        config = DiagnosticsConfig(witnesses=((0.2, 0.4),))
        self.assertEqual(config.witnesses, ((0.2, 0.4),))
        with self.assertRaises(ValidationError):
            DiagnosticsConfig(witnesses=((0.0, 0.4),))
        with self.assertRaises(ValidationError):
            DiagnosticsConfig(ks_samples=10)


class TestSpecFiles(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_parse_key_values(self):
        values = parse_key_values("# comment\nschema_version = 1\nFamily = Clayton  # trailing\n\ntheta=2\n")
        self.assertEqual(values, {"family": "Clayton", "theta": "2"})

    def test_schema_version_is_required(self):
        with self.assertRaises(ValidationError):
            parse_key_values("family = clayton\n")
        with self.assertRaises(ValidationError):
            parse_key_values("schema_version = 2\n")

    def test_malformed_lines(self):
        for text in ("schema_version = 1\nfamily\n", "schema_version = 1\ntheta = 1\ntheta = 2\n", "schema_version = 1\n = 3\n"):
            with self.subTest(text=text):
                with self.assertRaises(ValidationError):
                    parse_key_values(text)

    def test_fit_config_from_mapping(self):
        config = fit_config_from_mapping(
            {"candidates": "1, 3", "covariance_mode": "spherical", "restarts": "2"}
        )
        self.assertEqual(config.candidates, (1, 3))
        self.assertEqual(config.restarts, 2)
        with self.assertRaises(ValidationError):
            fit_config_from_mapping({"restarts": "two"})
        with self.assertRaises(ValidationError):
            fit_config_from_mapping({"iterations": "3"})

    def test_experiment_spec_from_mapping(self):
        spec = experiment_spec_from_mapping(
            {
                "family": "gaussian",
                "correlation": "1 0.5 0.5 1",
                "n": "400",
                "seed": "9",
                "candidates": "1 2",
                "marginal_means": "0",
                "marginal_sds": "1",
            }
        )
        self.assertEqual(spec.copula.family, "gaussian")
        self.assertEqual(spec.n, 400)
        self.assertEqual(spec.fit.seed, 9)
        self.assertEqual(spec.fit.candidates, (1, 2))
        self.assertEqual(spec.marginals[1].means, (0.0,))

    def test_per_margin_keys_override_shared_marginals(self):
        spec = experiment_spec_from_mapping(
            {
                "family": "independence",
                "dimension": "3",
                "marginal_means": "0",
                "marginal_sds": "1",
                "marginal2_means": "-1 1",
                "marginal2_sds": "0.5",
                "marginal3_weights": "1",
            }
        )
        self.assertEqual(len(spec.marginals), 3)
        self.assertEqual(spec.marginals[0].means, (0.0,))
        self.assertEqual(spec.marginals[1].means, (-1.0, 1.0))
        self.assertEqual(spec.marginals[1].sds, (0.5, 0.5))
        self.assertEqual(spec.marginals[2].weights, (1.0,))
        self.assertEqual(spec.marginals[2].sds, (1.0,))
        with self.assertRaises(ValidationError):
            experiment_spec_from_mapping({"family": "independence", "marginal3_means": "0"})
        with self.assertRaises(ValidationError):
            experiment_spec_from_mapping({"marginal1_means": "zero"})

    def test_diagnostics_config_from_mapping(self):
        config = diagnostics_config_from_mapping(
            {
                "grid_per_dim": "16",
                "witnesses": "0.1 0.5; 0.3, 0.7",
                "reference_family": "clayton",
                "reference_theta": "1",
            }
        )
        self.assertEqual(config.grid_per_dim, 16)
        self.assertEqual(config.witnesses, ((0.1, 0.5), (0.3, 0.7)))
        self.assertEqual(config.reference, CopulaSpec("clayton", theta=1.0))

    def test_load_copula_spec_from_file(self):
        path = Path(self.temp_dir) / "clayton.spec"
        path.write_text("schema_version = 1\nfamily = clayton\ntheta = 1.5\ndimension = 3\n", encoding="utf-8")
        spec = load_copula_spec(path)
        self.assertEqual((spec.family, spec.theta, spec.dimension), ("clayton", 1.5, 3))
        with self.assertRaises(ValidationError):
            load_copula_spec(Path(self.temp_dir) / "missing.spec")


class TestReadersAndWriters(unittest.TestCase):
    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_format_float(self):
        self.assertEqual(format_float(0.1), "0.1")
        self.assertEqual(format_float(np.float64(1 / 3)), repr(1 / 3))
        self.assertEqual(format_float(3), "3")
        self.assertEqual(format_float(True), "true")
        self.assertEqual(format_float(None), "")
        self.assertEqual(format_float(float("nan")), "nan")

    def test_csv_round_trip_is_lossless(self):
        values = np.random.default_rng(0).standard_normal((5, 2))
        path = self.temp_dir / "nested" / "data.csv"
        self.assertEqual(write_csv(path, ["x1", "x2"], values), 5)
        matrix, header = read_matrix(path)
        self.assertEqual(header, ["x1", "x2"])
        np.testing.assert_array_equal(matrix, values)

    def test_csv_stream(self):
        buffer = io.StringIO()
        write_csv_stream(buffer, ["a", "b"], [[1, 0.5]])
        self.assertEqual(buffer.getvalue(), "a,b\n1,0.5\n")

    def test_read_matrix_without_header(self):
        path = self.temp_dir / "plain.csv"
        path.write_text("1,2\n3,4\n", encoding="utf-8")
        matrix, header = read_matrix(path)
        self.assertIsNone(header)
        np.testing.assert_array_equal(matrix, [[1.0, 2.0], [3.0, 4.0]])

    def test_read_matrix_errors(self):
        ragged = self.temp_dir / "ragged.csv"
        ragged.write_text("1,2\n3\n", encoding="utf-8")
        with self.assertRaises(DimensionError):
            read_matrix(ragged)
        text = self.temp_dir / "text.csv"
        text.write_text("x,y\n1,abc\n", encoding="utf-8")
        with self.assertRaises(ValidationError):
            read_matrix(text)
        with self.assertRaises(ValidationError):
            read_matrix(self.temp_dir / "missing.csv")

    def test_json_writer_replaces_non_finite_values(self):
        path = self.temp_dir / "doc.json"
        write_json(path, {"b": np.float64(np.nan), "a": np.arange(2)})
        self.assertEqual(path.read_text(encoding="utf-8"), '{\n  "a": [\n    0,\n    1\n  ],\n  "b": null\n}\n')

    def test_model_file_round_trip(self):
        q = QRDensity(GaussianMixtureModel.identity(2), MarginalTransform.standard_normal(2))
        path = self.temp_dir / "model.json"
        write_json(path, q.to_export_dict())
        restored = load_model(path)
        self.assertEqual(restored.dimension, 2)
        bad = self.temp_dir / "bad.json"
        bad.write_text("[1, 2]", encoding="utf-8")
        with self.assertRaises(ValidationError):
            load_model(bad)


if __name__ == "__main__":
    unittest.main()
