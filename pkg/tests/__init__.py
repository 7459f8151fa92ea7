# tests/__init__.py
# This file makes Python treat the `tests` directory as a package.

"""Test suite for drover.

One module per service package, plus configuration, CLI and orchestration
tests. Shared maps, the bundled robot and small roadmaps are built once per
session in ``conftest.py``.

Run tests using pytest from the project root:
    pytest tests/
"""
