#
# hdgstokes/result.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Result records of the studies, their text summaries and the CSV / JSON
table writers.
"""

import csv
import io
import json
import math
import numbers
import os


CONVERGENCE_COLUMNS = (
    'level', 'h', 'elements', 'dofs', 'gdofs', 'nze', 'l2_u', 'h1_u', 'l2_p',
    'div_l2', 'jump_n', 'rate_l2_u', 'rate_h1_u')

SOLVE_COLUMNS = (
    'k', 'mode', 'variant', 'reconstructed', 'nu', 'elements', 'h', 'dofs',
    'gdofs', 'nze', 'l2_u', 'h1_u', 'energy', 'l2_p', 'div_l2', 'jump_n',
    'jump_n_proj', 'jump_t')

NU_SWEEP_COLUMNS = ('nu', 'h1_basic', 'h1_pr', 'l2_basic', 'l2_pr', 'ratio')

COUNTS_COLUMNS = (
    'k', 'mode', 'projected_jumps', 'elements', 'interior_facets', 'dofs',
    'gdofs', 'nze')

BASIS_CHECK_COLUMNS = (
    'dim', 'k', 'facet', 'normal_orthogonality', 'volume_orthogonality',
    'trace_support')

FORMATS = ('csv', 'json')

_REPORT_KEYS = {
    'l2_velocity': 'l2_u',
    'h1_velocity': 'h1_u',
    'energy': 'energy',
    'l2_pressure': 'l2_p',
    'div_l2': 'div_l2',
    'normal_jump_l2': 'jump_n',
    'normal_jump_proj_l2': 'jump_n_proj',
    'tangential_jump_norm': 'jump_t',
    'dofs': 'dofs',
    'gdofs': 'gdofs',
    'nze': 'nze',
}
"""the key is the ErrorReport field, the value is the column we save it to."""


def report_record(report):
    ''' The columns of an ErrorReport as a dict. '''
    return dict((column, getattr(report, field))
                for field, column in _REPORT_KEYS.items())


def solve_record(k, mode, variant, reconstructed, nu, mesh, report):
    record = report_record(report)
    record.update({'k': k, 'mode': mode, 'variant': variant,
                   'reconstructed': reconstructed, 'nu': nu,
                   'elements': mesh.n_elements, 'h': mesh.h_max})
    return record


def convergence_records(table):
    '''
    One record per level of a ConvergenceTable; the rates of the first level
    are empty.
    '''
    records = []
    for row, rates in zip(table.rows, table.rates):
        record = report_record(row.report)
        record.update({'level': row.level, 'h': row.h,
                       'elements': row.elements,
                       'rate_l2_u': rates['l2_velocity'] if rates else None,
                       'rate_h1_u': rates['h1_velocity'] if rates else None})
        records.append(record)
    return records


def nu_sweep_records(rows):
    return [{'nu': row.nu, 'h1_basic': row.h1_basic, 'h1_pr': row.h1_pr,
             'l2_basic': row.l2_basic, 'l2_pr': row.l2_pr,
             'ratio': row.h1_basic / row.h1_pr} for row in rows]


def counts_record(k, mode, projected_jumps, mesh, counts):
    return {'k': k, 'mode': mode, 'projected_jumps': projected_jumps,
            'elements': mesh.n_elements,
            'interior_facets': len(mesh.interior_facets),
            'dofs': counts.dofs, 'gdofs': counts.gdofs, 'nze': counts.nze}


def format_value(value):
    '''
    Text form of a table entry: floats in scientific notation with 16
    significant digits, booleans in lower case, None as an empty string.
    '''
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, numbers.Integral):
        return str(value)
    if isinstance(value, float) or hasattr(value, 'dtype'):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        return '{0:.15e}'.format(value)
    return str(value)


def parse_value(x):
    '''
    A function that takes a string x and returns its interpretation as a
    bool, int, float, or string in that order of preference. The empty
    string gives None.
    '''
    if len(x) == 0:
        return None
    if x in ('true', 'false'):
        return x == 'true'
    try:
        return int(x)
    except ValueError:
        pass
    try:
        return float(x)
    except ValueError:
        pass
    return x


def _json_value(value):
    if hasattr(value, 'dtype'):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def make_result_summary(records, columns, title):
    '''
    A fixed width text table of records, one line per record.
    '''
    cells = [[format_value(record.get(column)) for column in columns]
             for record in records]
    widths = [max([len(column)] + [len(row[i]) for row in cells])
              for i, column in enumerate(columns)]
    lines = [title,
             '  '.join(c.rjust(w) for c, w in zip(columns, widths))]
    lines.extend('  '.join(c.rjust(w) for c, w in zip(row, widths))
                 for row in cells)
    return '\n'.join(lines)


def print_summary(records, columns, title):
    ''' Prints out the summary produced by make_result_summary. '''
    print("\n" + make_result_summary(records, columns, title))


def table_text(records, columns, fmt='csv'):
    ''' The file content of a table in the given format. '''
    assert fmt in FORMATS, \
        "Please choose format equal to either 'csv' or 'json'."
    if fmt == 'csv':
        stream = io.StringIO()
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(columns)
        for record in records:
            writer.writerow([format_value(record.get(c)) for c in columns])
        return stream.getvalue()
    rows = [json_record(record, columns) for record in records]
    return json.dumps(rows, indent=2) + '\n'


def json_record(record, columns):
    ''' A JSON-ready dict with the keys in column order. '''
    return dict((c, _json_value(record.get(c))) for c in columns)


def write_table(records, columns, target, fmt='csv'):
    '''
    Args:
        records: list of dicts.
        columns: the column names, in order.
        target: the path where we will save the table.
        fmt: 'csv' or 'json'.

    Effect:
        Writes the table to target, creating the target folder if needed.
    '''
    text = table_text(records, columns, fmt)
    folder = os.path.dirname(target)
    if folder and not os.path.exists(folder):
        os.makedirs(folder)
    with open(target, "w") as fp:
        fp.write(text)


def read_table(filepath):
    '''
    Reads a table written by write_table; the format follows the file
    extension (.json, anything else is CSV).
    '''
    with open(filepath) as fp:
        if filepath.endswith('.json'):
            return json.load(fp)
        reader = csv.DictReader(fp)
        return [dict((key, parse_value(value)) for key, value in row.items())
                for row in reader]
