"""Smoke tests: catch syntax errors, bad imports, broken module structure."""

import importlib


def test_import_config():
    importlib.import_module("tailkernel.config")


def test_import_errors():
    importlib.import_module("tailkernel.errors")


def test_import_logging():
    importlib.import_module("tailkernel.logging_setup")


def test_import_models():
    importlib.import_module("tailkernel.models")


def test_import_survival():
    importlib.import_module("tailkernel.survival")


def test_import_kernels():
    importlib.import_module("tailkernel.kernels")


def test_import_estimators():
    importlib.import_module("tailkernel.estimators")


def test_import_asymptotics():
    importlib.import_module("tailkernel.asymptotics")


def test_import_selection():
    importlib.import_module("tailkernel.selection")


def test_import_montecarlo():
    importlib.import_module("tailkernel.montecarlo")


def test_import_csvio():
    importlib.import_module("tailkernel.csvio")


def test_import_app():
    importlib.import_module("tailkernel.app")


def test_import_commands():
    mod = importlib.import_module("commands")
    names = [name for name, _ in mod.ALL_COMMANDS]
    assert names == ["estimate", "simulate", "asymptotics", "select-k"]


def test_import_command_modules():
    for name in ("estimate", "simulate", "asymptotics", "select_k"):
        mod = importlib.import_module(f"commands.{name}")
        assert callable(mod.register)
