#
# hdgstokes/cli.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Command line front end: `hdgstokes <command> [options]` with the commands
solve, convergence, nu-sweep, counts and basis-check.

Options are layered: built-in defaults, then a `key = value` config file
given by --config, then the command line flags.
"""

import argparse
import collections
import logging
import os
import sys

from . import analysis as an
from . import assembly as asm
from . import condense as cd
from . import fespace as fs
from . import mesh as msh
from . import refbasis as rb
from . import result as res
from . import solve as sv


_LOGGER = logging.getLogger(__name__)

THREADS_ENV = 'HDGSTOKES_NUM_THREADS'

COMMANDS = ('solve', 'convergence', 'nu-sweep', 'counts', 'basis-check')
VARIANT_COMMANDS = ('solve', 'convergence')

DEFAULT_NUS = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1., 1e1, 1e2)


class ConfigError(Exception):
    '''
    Raised for malformed config files and invalid option combinations.
    '''
    pass


def _parse_bool(text):
    value = str(text).strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError("not a boolean: {0}".format(text))


def _parse_nus(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).replace(',', ' ').split())


_OPTIONS = collections.OrderedDict([
    ('k', (int, 2)),
    ('mesh_n', (int, 4)),
    ('levels', (int, 4)),
    ('n0', (int, 2)),
    ('nu', (float, 1.)),
    ('nus', (_parse_nus, DEFAULT_NUS)),
    ('mode', (str, fs.RELAXED)),
    ('variant', (str, sv.BASIC)),
    ('reconstruct', (_parse_bool, False)),
    ('lam', (float, asm.DEFAULT_LAMBDA)),
    ('reduced_space', (_parse_bool, False)),
    ('projected_jumps', (_parse_bool, True)),
    ('dim', (int, None)),
    ('tol', (float, 1e-10)),
    ('output', (str, None)),
    ('format', (str, 'csv')),
])
"""the key is the RunConfig field, the value is (parser, default)."""

_ALIASES = {'lambda': 'lam', 'reduced': 'reduced_space'}

RunConfig = collections.namedtuple('RunConfig',
                                   ['command'] + list(_OPTIONS) + ['threads'])


def read_config_file(filepath):
    '''
    Reads `key = value` lines; blank lines and `#` comments are ignored,
    keys may use `-` or `_`.

    Returns:
      a dict of parsed values.

    Raises:
      ConfigError: on unreadable files, malformed lines, unknown keys or
        unparsable values.
    '''
    try:
        with open(filepath) as fp:
            lines = fp.readlines()
    except (IOError, OSError) as err:
        raise ConfigError("Cannot read config file {0}: {1}".format(
            filepath, err))
    values = {}
    for number, line in enumerate(lines, 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError("{0}:{1}: expected 'key = value', got "
                              "'{2}'".format(filepath, number, line))
        key, value = [part.strip() for part in line.split('=', 1)]
        key = key.replace('-', '_')
        key = _ALIASES.get(key, key)
        if key not in _OPTIONS:
            raise ConfigError("{0}:{1}: unknown key '{2}'".format(
                filepath, number, key))
        values[key] = _convert(key, value)
    return values


def _convert(key, value):
    parser = _OPTIONS[key][0]
    try:
        return parser(value)
    except ValueError as err:
        raise ConfigError("Invalid value for {0}: {1}".format(key, err))


def thread_count(environ=None):
    ''' Thread count from the environment, 1 if unset. '''
    environ = os.environ if environ is None else environ
    text = environ.get(THREADS_ENV, '').strip()
    if not text:
        return 1
    try:
        threads = int(text)
    except ValueError:
        raise ConfigError("{0} must be an integer, got '{1}'".format(
            THREADS_ENV, text))
    if threads < 1:
        raise ConfigError("{0} must be >= 1, got {1}".format(THREADS_ENV,
                                                             threads))
    return threads


def check_config(config):
    '''
    checks that the values of a RunConfig can be used together:
        - k >= 1, levels >= 3 for convergence, mesh sizes >= 1, nu > 0
        - mode, variant and format are known
        - the 'pr' variant needs the relaxed mode in the commands that
          solve with the chosen variant

    Raises:
      ConfigError: listing every violation.
    '''
    problems = []
    if config.k < 1:
        problems.append("k must be >= 1, got {0}".format(config.k))
    if config.levels < 1 or (config.command == 'convergence'
                             and config.levels < 3):
        problems.append("levels must be >= 3 for a convergence study, got "
                        "{0}".format(config.levels))
    if config.mesh_n < 1 or config.n0 < 1:
        problems.append("mesh sizes must be >= 1")
    if config.nu <= 0 or any(nu <= 0 for nu in config.nus):
        problems.append("viscosities must be positive")
    if config.lam <= 0:
        problems.append("lambda must be positive, got {0}".format(config.lam))
    if config.mode not in fs.MODES:
        problems.append("mode must be one of {0}, got '{1}'".format(
            fs.MODES, config.mode))
    if config.variant not in sv.VARIANTS:
        problems.append("variant must be one of {0}, got '{1}'".format(
            sv.VARIANTS, config.variant))
    if config.command in VARIANT_COMMANDS and config.variant == sv.PR \
            and config.mode == fs.FULL:
        problems.append("variant 'pr' needs mode 'relaxed'")
    if config.format not in res.FORMATS:
        problems.append("format must be one of {0}, got '{1}'".format(
            res.FORMATS, config.format))
    if config.dim not in (None, 2, 3):
        problems.append("dim must be 2 or 3, got {0}".format(config.dim))
    if problems:
        raise ConfigError("; ".join(problems))


def build_parser():
    ''' The argparse parser; every option defaults to None (unset). '''
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='key = value config file')
    common.add_argument('--k', type=int, help='polynomial order')
    common.add_argument('--lambda', dest='lam', type=float,
                        help='stabilization parameter')
    common.add_argument('-o', '--output', help='output table path')
    common.add_argument('--format', choices=res.FORMATS,
                        help='output table format')
    common.add_argument('-v', '--verbose', action='store_true',
                        help='debug logging on stderr')

    discretization = argparse.ArgumentParser(add_help=False)
    discretization.add_argument('--mode', choices=fs.MODES)
    discretization.add_argument('--reduced-space', dest='reduced_space',
                                action='store_const', const=True,
                                help='drop divergence cell functions and '
                                     'high order pressures')
    discretization.add_argument('--unprojected', dest='projected_jumps',
                                action='store_const', const=False,
                                help='tangential facet unknowns of order k')

    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument('--nu', type=float, help='viscosity')
    solving.add_argument('--variant', choices=sv.VARIANTS)
    solving.add_argument('--reconstruct', action='store_const', const=True,
                         help='report the reconstructed velocity')

    parser = argparse.ArgumentParser(
        prog='hdgstokes',
        description='Relaxed H(div)-conforming HDG Stokes experiments.')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    solve = commands.add_parser('solve', parents=[common, discretization,
                                                  solving],
                                help='solve on one mesh')
    solve.add_argument('--mesh-n', dest='mesh_n', type=int)

    convergence = commands.add_parser(
        'convergence', parents=[common, discretization, solving],
        help='errors and rates on uniform refinements')
    convergence.add_argument('--levels', type=int)
    convergence.add_argument('--n0', type=int)

    sweep = commands.add_parser('nu-sweep', parents=[common],
                                help='basic vs pr errors over viscosities')
    sweep.add_argument('--mesh-n', dest='mesh_n', type=int)
    sweep.add_argument('--nus', help='comma separated viscosities')

    counts = commands.add_parser('counts', parents=[common, discretization],
                                 help='dofs, gdofs and nze without solving')
    counts.add_argument('--mesh-n', dest='mesh_n', type=int)

    check = commands.add_parser('basis-check', parents=[common],
                                help='reference basis orthogonality checks')
    check.add_argument('--dim', type=int, choices=(2, 3))
    check.add_argument('--tol', type=float)
    return parser


def make_config(args, environ=None):
    '''
    Merges defaults, the config file and the parsed flags into a RunConfig.
    '''
    values = dict((key, option[1]) for key, option in _OPTIONS.items())
    if getattr(args, 'config', None):
        values.update(read_config_file(args.config))
    for key in _OPTIONS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = _convert(key, flag) if key == 'nus' else flag
    config = RunConfig(command=args.command, threads=thread_count(environ),
                       **values)
    check_config(config)
    return config


def _startup_check(config):
    ''' Coercivity of the viscosity operator on a coarse mesh. '''
    spaces = fs.build_spaces(msh.unit_square_mesh(2), config.k, config.mode,
                             config.reduced_space, config.projected_jumps)
    system = asm.assemble_system(spaces, 1., None, config.lam)
    asm.check_coercivity(system)


def run_solve(config):
    mesh = msh.unit_square_mesh(config.mesh_n)
    case = an.manufactured_case(2, config.nu)
    configuration = sv.SolverConfiguration(config.mode, config.reduced_space,
                                           config.projected_jumps, config.lam)
    discretization = sv.discretize(mesh, config.k, config.nu, case.force,
                                   configuration)
    solution = sv.solve_discretization(discretization, config.variant)
    if config.reconstruct:
        solution = sv.reconstruct_solution(solution,
                                           discretization.reconstruction)
    report = an.compute_errors(solution, case)
    return [res.solve_record(config.k, config.mode, config.variant,
                             config.reconstruct, config.nu, mesh, report)], \
        res.SOLVE_COLUMNS


def run_convergence(config):
    table = an.convergence_study(
        config.k, config.mode, config.variant, config.reconstruct,
        config.levels, config.nu, config.n0, config.lam,
        config.reduced_space, config.projected_jumps, config.threads)
    return res.convergence_records(table), res.CONVERGENCE_COLUMNS


def run_nu_sweep(config):
    rows = an.nu_sweep(config.k, config.mesh_n, config.nus, config.lam,
                       config.threads)
    return res.nu_sweep_records(rows), res.NU_SWEEP_COLUMNS


def run_counts(config):
    mesh = msh.unit_square_mesh(config.mesh_n)
    counts = an.count_costs(mesh, config.k, config.mode,
                            config.projected_jumps, config.reduced_space,
                            config.lam)
    return [res.counts_record(config.k, config.mode, config.projected_jumps,
                              mesh, counts)], res.COUNTS_COLUMNS


def run_basis_check(config):
    records = []
    for dim in ((2, 3) if config.dim is None else (config.dim,)):
        basis = rb.build_reference_basis(dim, config.k)
        volume = rb.check_highest_order_volume_orthogonality(basis)
        for facet in range(len(basis.facet_blocks)):
            records.append({
                'dim': dim, 'k': config.k, 'facet': facet,
                'normal_orthogonality':
                    rb.check_normal_orthogonality(basis, facet),
                'volume_orthogonality': volume,
                'trace_support': rb.check_trace_support(basis, facet)})
    return records, res.BASIS_CHECK_COLUMNS


def basis_violation(records):
    ''' Largest reported violation of a basis-check table. '''
    return max(max(r['normal_orthogonality'], r['volume_orthogonality'],
                   r['trace_support']) for r in records)


_RUNNERS = {
    'solve': run_solve,
    'convergence': run_convergence,
    'nu-sweep': run_nu_sweep,
    'counts': run_counts,
    'basis-check': run_basis_check,
}


def run(config):
    '''
    Runs one command and writes its table to config.output, followed by a
    summary on stdout, or writes the table to stdout if no output is set.

    Returns:
      the exit status: 0 on success, 1 when an internal check fails.
    '''
    try:
        if config.command in ('solve', 'convergence', 'nu-sweep'):
            _startup_check(config)
        records, columns = _RUNNERS[config.command](config)
    except (AssertionError, asm.AssemblyError, cd.CondensationError,
            cd.SolverBreakdownError) as err:
        _LOGGER.error("%s failed: %s", config.command, err)
        return 1
    if config.output:
        res.write_table(records, columns, config.output, config.format)
        _LOGGER.info("wrote %d rows to %s", len(records), config.output)
        res.print_summary(records, columns, config.command)
    else:
        sys.stdout.write(res.table_text(records, columns, config.format))
    if config.command == 'basis-check':
        worst = basis_violation(records)
        if worst >= config.tol:
            _LOGGER.error("basis check violation %.3e exceeds tolerance %.1e",
                          worst, config.tol)
            return 1
    return 0


def main(argv=None):
    ''' Entry point of the `hdgstokes` command. '''
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)
    try:
        config = make_config(args)
    except ConfigError as err:
        sys.stderr.write("hdgstokes: error: {0}\n".format(err))
        return 2
    return run(config)


if __name__ == '__main__':
    sys.exit(main())
