"""
Global test configuration. Use this file to define fixtures to use
in both doctests and regular tests.
"""
import pytest
import numpy as np


@pytest.fixture(autouse=True, scope='session')
def add_np(doctest_namespace):
    doctest_namespace['np'] = np
