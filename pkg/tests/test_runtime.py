import json
import tempfile
import unittest
from pathlib import Path

from levylab.config import ConfigError, Settings, load_settings
from levylab.runtime import capture_events, current_log, log_event, traced
from levylab.version import get_version


@traced
def _square(x: int) -> int:
    log_event("squared", value=x * x)
    return x * x


@traced
def _explode() -> None:
    raise ValueError("boom")


class TestEventLog(unittest.TestCase):
    def test_no_log_outside_capture(self) -> None:
        self.assertIsNone(current_log())
        log_event("ignored")
        self.assertEqual(_square(3), 9)

    def test_traced_records_start_and_end(self) -> None:
        with capture_events() as log:
            self.assertEqual(_square(4), 16)
        self.assertEqual(log.kinds(), ["op_start", "squared", "op_end"])
        self.assertEqual(log.events[-1]["status"], "ok")
        self.assertEqual(log.events[0]["op"], "_square")
        self.assertEqual(_square.__name__, "_square")

    def test_errors_are_recorded_and_reraised(self) -> None:
        with capture_events() as log:
            with self.assertRaises(ValueError):
                _explode()
        end = log.events[-1]
        self.assertEqual(end["status"], "error")
        self.assertIn("boom", end["error"])

    def test_jsonl_and_audit_file(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            audit = Path(tmp) / "logs" / "audit.jsonl"
            with capture_events(audit_path=str(audit)) as log:
                _square(2)
            lines = audit.read_text(encoding="utf-8").splitlines()
            self.assertEqual(len(lines), 3)
            self.assertEqual(json.loads(lines[1])["value"], 4)
            self.assertEqual(log.to_jsonl().count("\n"), 3)

    def test_nested_capture_restores_outer_log(self) -> None:
        with capture_events() as outer:
            with capture_events() as inner:
                log_event("inner")
            log_event("outer")
        self.assertEqual(inner.kinds(), ["inner"])
        self.assertEqual(outer.kinds(), ["outer"])


class TestSettings(unittest.TestCase):
    def test_defaults(self) -> None:
        settings = load_settings({})
        self.assertEqual(settings, Settings())
        self.assertEqual(settings.tolerance, 1e-10)
        self.assertEqual(settings.grid_points, 64)

    def test_environment(self) -> None:
        settings = load_settings({"LEVYLAB_TOLERANCE": "1e-8", "LEVYLAB_GRID_POINTS": " 32 ", "LEVYLAB_SEED": ""})
        self.assertEqual(settings.tolerance, 1e-8)
        self.assertEqual(settings.grid_points, 32)
        self.assertEqual(settings.seed, 0)

    def test_invalid_environment(self) -> None:
        with self.assertRaises(ConfigError):
            load_settings({"LEVYLAB_GRID_POINTS": "many"})
        with self.assertRaises(ConfigError):
            load_settings({"LEVYLAB_GRID_POINTS": "12"})
        with self.assertRaises(ConfigError):
            load_settings({"LEVYLAB_TOLERANCE": "-1"})

    def test_overrides(self) -> None:
        base = Settings()
        self.assertIs(base.with_overrides(tolerance=None), base)
        self.assertEqual(base.with_overrides(seed=5).seed, 5)
        with self.assertRaises(ConfigError):
            base.with_overrides(period=0.0)


class TestVersion(unittest.TestCase):
    def test_version_is_a_string(self) -> None:
        version = get_version()
        self.assertIsInstance(version, str)
        self.assertTrue(version)


if __name__ == "__main__":
    unittest.main()
