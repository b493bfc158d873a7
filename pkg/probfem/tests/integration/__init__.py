# probfem/tests/integration/__init__.py
"""Chain-level checks of the complete sampling workflow."""
