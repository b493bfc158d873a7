# probfem/tests/__init__.py
