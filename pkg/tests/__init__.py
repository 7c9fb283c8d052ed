#
# tests/__init__.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
""" Unit test for hdgstokes.
"""
from .test_suite import suite
