#!/usr/bin/env python
# -*- coding: utf-8 -*-
# pylint: disable=E1101
#
# tests/unittest_result.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Result records, summaries and table files.
"""

import json
import math
import os
import shutil
import tempfile
import unittest

import numpy as np

import hdgstokes.analysis as an
import hdgstokes.result as res


class TestValues(unittest.TestCase):
    '''
    Testing the text form of table entries.
    '''

    def test_format(self):
        self.assertEqual(res.format_value(1.5), '1.500000000000000e+00')
        self.assertEqual(res.format_value(np.float64(0.25)),
                         '2.500000000000000e-01')
        self.assertEqual(res.format_value(True), 'true')
        self.assertEqual(res.format_value(False), 'false')
        self.assertEqual(res.format_value(None), '')
        self.assertEqual(res.format_value(np.int64(12)), '12')
        self.assertEqual(res.format_value(float('nan')), 'nan')
        self.assertEqual(res.format_value('relaxed'), 'relaxed')

    def test_parse(self):
        self.assertTrue(res.parse_value('') is None)
        self.assertTrue(res.parse_value('true') is True)
        self.assertEqual(res.parse_value('17'), 17)
        self.assertEqual(res.parse_value('2.500000000000000e-01'), 0.25)
        self.assertEqual(res.parse_value('pr'), 'pr')
        self.assertTrue(math.isnan(res.parse_value('nan')))


class TestRecords(unittest.TestCase):
    '''
    Testing the record builders.
    '''

    def setUp(self):
        self.report = an.ErrorReport(1e-3, 2e-2, 3e-2, 4e-3, 0., 1e-4, 0.,
                                     5e-3, 100, 41, 900)

    def test_report_record(self):
        record = res.report_record(self.report)
        self.assertEqual(record['h1_u'], 2e-2)
        self.assertEqual(record['jump_n'], 1e-4)
        self.assertEqual(record['gdofs'], 41)

    def test_convergence_records(self):
        rows = [an.ConvergenceRow(level, 0.5 ** level, 8 * 4 ** level,
                                  self.report) for level in range(3)]
        table = an.ConvergenceTable(2, 'relaxed', 'pr', False, 1., rows,
                                    an.convergence_rates(rows))
        records = res.convergence_records(table)
        self.assertEqual(len(records), 3)
        self.assertTrue(records[0]['rate_h1_u'] is None)
        self.assertAlmostEqual(records[1]['rate_h1_u'], 0.)
        self.assertEqual(records[2]['elements'], 128)

    def test_nu_sweep_records(self):
        rows = [an.NuSweepRow(1e-3, 4., 2., 1., 1.)]
        records = res.nu_sweep_records(rows)
        self.assertEqual(records[0]['ratio'], 2.)

    def test_summary(self):
        records = [res.report_record(self.report)]
        text = res.make_result_summary(records, ('h1_u', 'gdofs'), 'errors')
        lines = text.split('\n')
        self.assertEqual(lines[0], 'errors')
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[2].strip().endswith('41'))


class TestTables(unittest.TestCase):
    '''
    Testing the CSV and JSON writers.
    '''

    @classmethod
    def setUpClass(cls):
        cls.temp_folder = tempfile.mkdtemp()

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.temp_folder)

    def setUp(self):
        self.records = [{'k': 2, 'mode': 'relaxed', 'projected_jumps': True,
                         'h': 0.125, 'rate': None},
                        {'k': 3, 'mode': 'full', 'projected_jumps': False,
                         'h': float('nan'), 'rate': 2.5}]
        self.columns = ('k', 'mode', 'projected_jumps', 'h', 'rate')

    def test_csv(self):
        target = os.path.join(self.temp_folder, 'new', 'table.csv')
        res.write_table(self.records, self.columns, target)
        self.assertTrue(os.path.exists(target))
        with open(target) as fp:
            header = fp.readline().strip()
        self.assertEqual(header, ','.join(self.columns))
        rows = res.read_table(target)
        self.assertEqual(rows[0], {'k': 2, 'mode': 'relaxed',
                                   'projected_jumps': True, 'h': 0.125,
                                   'rate': None})
        self.assertTrue(math.isnan(rows[1]['h']))
        self.assertEqual(rows[1]['rate'], 2.5)

    def test_json(self):
        target = os.path.join(self.temp_folder, 'table.json')
        res.write_table(self.records, self.columns, target, 'json')
        rows = res.read_table(target)
        self.assertEqual(rows[0]['h'], 0.125)
        self.assertTrue(rows[1]['h'] is None)
        with open(target) as fp:
            self.assertEqual(len(json.load(fp)), 2)

    def test_unknown_format(self):
        self.assertRaises(AssertionError, res.table_text, self.records,
                          self.columns, 'xml')


if __name__ == '__main__':
    unittest.main()
