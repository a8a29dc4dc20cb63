"""Command-line interface for Theta-Quant."""

import functools
import logging
import sys
import time
from pathlib import Path
from typing import Callable, List, Optional

import click
import numpy as np

from . import __version__
from .artifacts import ArtifactWriter
from .audits import (
    band_oracle_audit,
    bracket_audit,
    invariant_audit,
    legendre_audit,
    quantize_audit,
    theta_audit,
)
from .config import get_log_level, load_config, parse_complex, resolve_output
from .dynamics import (
    closed_solution,
    euler_embedding,
    euler_field,
    lambda_of,
    pole_free_window,
    poly_field,
    theta_field,
)
from .elliptic import series_state, theta_constants, theta_series
from .errors import ConfigError, ThetaQuantError
from .integrator import integrate
from .mathieu import band_chart
from .models import CheckResult, InertiaParams, RunConfig, SolutionParams


# Configure logging
try:
    _LOG_LEVEL = get_log_level()
except ConfigError:
    _LOG_LEVEL = 'INFO'
logging.basicConfig(
    level=getattr(logging, _LOG_LEVEL),
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EULER_INERTIA = InertiaParams(1.0, 2.0, 3.0)


class ComplexParamType(click.ParamType):
    """Complex numbers written with i or j, e.g. 'i', '0.5+2i'."""
    name = 'complex'

    def convert(self, value, param, ctx):
        if isinstance(value, complex):
            return value
        try:
            return parse_complex(value)
        except ValueError:
            self.fail(f"{value!r} is not a complex number", param, ctx)


COMPLEX = ComplexParamType()


def _common_options(func: Callable) -> Callable:
    """--config, --out, --format and --verbose shared by every command."""
    options = [
        click.option('--config', 'config_path', type=click.Path(path_type=Path), default=None,
                     help='INI file with [defaults] and per-command sections (default: none)'),
        click.option('--out', type=click.Path(path_type=Path), default=None,
                     help='Output file; relative paths go under THETA_QUANT_OUTPUT_DIR (default: none)'),
        click.option('--format', 'format', type=click.Choice(['csv', 'json']), default=None,
                     help='Output format (default: from the --out suffix, csv otherwise)'),
        click.option('--verbose', is_flag=True, default=False, help='Enable debug logging (default: off)'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _configure(command: str, config_path: Optional[Path], verbose: bool, **flags) -> RunConfig:
    """Load and validate the configuration; usage errors exit with code 2."""
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        config = load_config(config_path, command, flags)
    except ConfigError as e:
        click.echo(f"❌ Error: {e}", err=True)
        sys.exit(2)
    if config.out is not None:
        config.out = resolve_output(config.out)
    return config


def _guard(func: Callable) -> Callable:
    """Turn library errors into a message and exit code 1."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ThetaQuantError as e:
            logger.error(f"Command failed: {e}", exc_info=True)
            click.echo(f"❌ Error: {e}", err=True)
            sys.exit(1)
    return wrapper


def _report(title: str, results: List[CheckResult], config: RunConfig, started: float) -> None:
    """Print check results, write the optional report and exit 1 on any failure."""
    click.echo(f"🔎 {title}")
    for r in results:
        mark = "✅" if r.passed else "❌"
        click.echo(f"  {mark} {r.name}: {r.value:.3e} (threshold {r.threshold:.1e})")

    if config.out is not None:
        writer = ArtifactWriter(config.out.parent)
        path = writer.write_report(results, config.out.name)
        writer.write_metadata(path, config, time.perf_counter() - started)
        click.echo(f"📁 Report: {path}")

    failures = [r for r in results if not r.passed]
    if failures:
        click.echo(f"❌ {len(failures)} of {len(results)} checks failed:", err=True)
        for r in failures:
            detail = f" ({r.detail})" if r.detail else ""
            click.echo(f"  • {r.name}: {r.value:.3e} >= {r.threshold:.1e}{detail}", err=True)
        sys.exit(1)
    click.echo(f"✅ All {len(results)} checks passed")


@click.group()
@click.version_option(version=__version__)
def main():
    """
    Theta-Quant: theta functions as a dynamical system, its brackets,
    quantization and Mathieu band spectrum.

    Use 'theta-quant theta-eval' for theta values, 'theta-quant integrate'
    to export trajectories, the *-check commands for audits and
    'theta-quant mathieu-bands' for the gap chart.
    """
    pass


@main.command('theta-eval')
@click.option('--tau', type=COMPLEX, default=None, help='Lattice parameter, Im > 0 (default: i)')
@click.option('--z', type=COMPLEX, default=None, help='Evaluation point (default: 0)')
@click.option('--t0', type=float, default=None, help='Start of the audit window (default: 0.1)')
@click.option('--t1', type=float, default=None, help='End of the audit window (default: 1.0)')
@click.option('--tol', type=float, default=None, help='Integrator tolerance (default: 1e-10)')
@_common_options
@_guard
def theta_eval(config_path, out, format, verbose, **flags):
    """
    Evaluate theta_1..theta_4 at z and audit the theta ODE system.

    Example:
        theta-quant theta-eval --tau i --z 0.25
    """
    started = time.perf_counter()
    config = _configure('theta-eval', config_path, verbose, out=out, format=format, **flags)
    c = theta_constants(config.tau)

    click.echo(f"τ = {config.tau}, z = {config.z}")
    for j in range(1, 5):
        click.echo(f"  θ{j}(z|τ) = {theta_series(j, config.z, config.tau):.15g}")
    click.echo(f"  ϑ2 = {c.v2:.15g}, ϑ3 = {c.v3:.15g}, ϑ4 = {c.v4:.15g}")
    click.echo(f"  η = {c.eta:.15g}, Λ = {lambda_of(c):.15g}")
    click.echo()

    _report('Theta system audit', theta_audit(config.tau, config.t0, config.t1, config.tol), config, started)


@main.command('integrate')
@click.option('--system', type=click.Choice(['poly', 'theta', 'euler']), default=None,
              help='Flow to integrate (default: poly)')
@click.option('--tau', type=COMPLEX, default=None, help='Lattice parameter for --system theta (default: i)')
@click.option('--k', type=float, default=None, help='Modulus of the closed-form start (default: 0.6)')
@click.option('--alpha', type=COMPLEX, default=None, help='Scale of the closed-form start (default: 1)')
@click.option('--K0', 'K0', type=COMPLEX, default=None, help='Offset of xi (default: 0)')
@click.option('--eps', type=COMPLEX, default=None, help='Phase shift (default: 0)')
@click.option('--t0', type=float, default=None, help='Start time (default: 0.1)')
@click.option('--t1', type=float, default=None, help='End time (default: 1.0)')
@click.option('--tol', type=float, default=None, help='Per-step tolerance (default: 1e-10)')
@click.option('--samples', type=int, default=None, help='Number of output samples (default: 100)')
@_common_options
@_guard
def integrate_cmd(config_path, out, format, verbose, **flags):
    """
    Integrate a flow and export the trajectory (CSV or JSON).

    The polynomial and Euler flows start on the closed-form solution; the
    theta flow starts on the series values and its window is kept clear of
    the zeros of theta_1.

    Example:
        theta-quant integrate --system poly --t1 2 --out traj.csv
    """
    started = time.perf_counter()
    config = _configure('integrate', config_path, verbose, out=out, format=format, **flags)
    t0, t1 = config.t0, config.t1
    params = SolutionParams(k=config.k, alpha=config.alpha, K0=config.K0, eps=config.eps)

    if config.system == 'theta':
        t0, t1 = pole_free_window(t0, t1, config.tau)
        field = theta_field(theta_constants(config.tau))
        start = series_state(config.tau, t0).as_array()
        labels = ('th1', 'th2', 'th3', 'th4', 'dth1')
    elif config.system == 'euler':
        field = euler_field(EULER_INERTIA)
        p = closed_solution(params, t0)
        start = np.array(euler_embedding((p.x, p.y, p.z), EULER_INERTIA), dtype=complex)
        labels = ('X', 'Y', 'Z')
    else:
        field = poly_field(4)
        start = closed_solution(params, t0).as_array(4)
        labels = ('x', 'y', 'z', 'xi')

    click.echo(f"🚀 Integrating the {config.system} flow on [{t0}, {t1}] at tol {config.tol:.1e}")
    times = np.linspace(t0, t1, config.samples)
    trajectory = integrate(field, start, t0, t1, tol=config.tol, t_eval=times, labels=labels)

    writer = ArtifactWriter(config.out.parent)
    path = writer.write_trajectory(trajectory, config.out.name, config.output_format)
    writer.write_metadata(path, config, time.perf_counter() - started, {
        'accepted_steps': trajectory.accepted_steps,
        'rejected_steps': trajectory.rejected_steps,
    })
    click.echo(f"✅ {len(trajectory)} samples, {trajectory.accepted_steps} accepted / "
               f"{trajectory.rejected_steps} rejected steps")
    click.echo(f"📁 Trajectory: {path}")


@main.command()
@click.option('--tau', type=COMPLEX, default=None, help='Lattice parameter (default: i)')
@click.option('--k', type=float, default=None, help='Modulus (default: 0.6)')
@click.option('--alpha', type=COMPLEX, default=None, help='Scale (default: 1)')
@click.option('--K0', 'K0', type=COMPLEX, default=None, help='Offset of xi (default: 0)')
@click.option('--eps', type=COMPLEX, default=None, help='Phase shift (default: 0)')
@click.option('--t0', type=float, default=None, help='Start time (default: 0.1)')
@click.option('--t1', type=float, default=None, help='End time (default: 1.0)')
@click.option('--tol', type=float, default=None, help='Integrator tolerance (default: 1e-10)')
@click.option('--seed', type=int, default=None, help='Random seed for sampled points (default: 20240607)')
@click.option('--samples', type=int, default=None, help='Number of sampled points (default: 100)')
@_common_options
@_guard
def invariants(config_path, out, format, verbose, **flags):
    """
    Audit the closed-form solution, the straightening map and conserved quantities.

    Example:
        theta-quant invariants --tau i --t0 0.1 --t1 1.0 --tol 1e-10
    """
    started = time.perf_counter()
    config = _configure('invariants', config_path, verbose, out=out, format=format, **flags)
    results = invariant_audit(
        tau=config.tau, k=config.k, alpha=config.alpha, K0=config.K0, eps=config.eps,
        t0=config.t0, t1=config.t1, tol=config.tol, seed=config.seed, samples=config.samples,
    )
    _report('Trajectory invariants', results, config, started)


@main.command('bracket-check')
@click.option('--seed', type=int, default=None, help='Random seed for sampled points (default: 20240607)')
@click.option('--samples', type=int, default=None, help='Number of sampled points (default: 100)')
@click.option('--fd-tol', type=float, default=None, help='Finite-difference tolerance (default: 1e-6)')
@_common_options
@_guard
def bracket_check(config_path, out, format, verbose, **flags):
    """
    Audit the Poisson brackets: Jacobi identity, determinant and Hamiltonian field.

    Example:
        theta-quant bracket-check --seed 7 --samples 200
    """
    started = time.perf_counter()
    config = _configure('bracket-check', config_path, verbose, out=out, format=format, **flags)
    _report('Bracket audit', bracket_audit(config.seed, config.samples, config.fd_tol), config, started)


@main.command('quantize-check')
@click.option('--truncation', type=int, default=None, help='Polynomial truncation degree D >= 4 (default: 8)')
@_common_options
@_guard
def quantize_check(config_path, out, format, verbose, **flags):
    """
    Verify the commutator table and the Heisenberg equations exactly.

    Example:
        theta-quant quantize-check --truncation 10
    """
    started = time.perf_counter()
    config = _configure('quantize-check', config_path, verbose, out=out, format=format, **flags)
    _report('Operator audit', quantize_audit(config.truncation), config, started)


@main.command('legendre-check')
@click.option('--fd-tol', type=float, default=None, help='Relative finite-difference tolerance (default: 1e-6)')
@_common_options
@_guard
def legendre_check(config_path, out, format, verbose, **flags):
    """
    Compare the closed Legendre and Z partials with finite differences.

    Example:
        theta-quant legendre-check
    """
    started = time.perf_counter()
    config = _configure('legendre-check', config_path, verbose, out=out, format=format, **flags)
    _report('Legendre calculus audit', legendre_audit(config.fd_tol), config, started)


@main.command('mathieu-bands')
@click.option('--a-min', type=float, default=None, help='Smallest amplitude A (default: 0)')
@click.option('--a-max', type=float, default=None, help='Largest amplitude A (default: 5)')
@click.option('--a-steps', type=int, default=None, help='Number of grid points in A (default: 51)')
@click.option('--e-max', type=float, default=None, help='Energy ceiling for gap lower edges (default: 25)')
@click.option('--modes', type=int, default=None, help='Fourier truncation M >= 8 (default: 40)')
@click.option('--threads', type=int, default=None,
              help='Worker threads (default: THETA_QUANT_THREADS or 4)')
@click.option('--verify', is_flag=True, default=False,
              help='Cross-check edges against the Hill discriminant (default: off)')
@_common_options
@_guard
def mathieu_bands(config_path, out, format, verbose, verify, **flags):
    """
    Compute the gap chart of Psi'' = (A cos(gamma) - E) Psi over an A grid.

    Example:
        theta-quant mathieu-bands --a-min 0 --a-max 5 --a-steps 51 --e-max 25 --out chart.csv
    """
    started = time.perf_counter()
    config = _configure('mathieu-bands', config_path, verbose, out=out, format=format, **flags)
    click.echo(f"🚀 Band chart for A in [{config.a_min}, {config.a_max}] ({config.a_steps} points), "
               f"E < {config.e_max}")

    rows = band_chart(config.a_grid, config.e_max, config.modes, config.threads)
    writer = ArtifactWriter(config.out.parent)
    path = writer.write_band_chart(rows, config.out.name, config.output_format)
    unconverged = sorted({row['A'] for row in rows if not row['converged']})
    writer.write_metadata(path, config, time.perf_counter() - started, {
        'rows': len(rows),
        'unconverged_amplitudes': unconverged,
    })
    click.echo(f"✅ {len(rows)} gap rows written")
    click.echo(f"📁 Chart: {path}")
    if unconverged:
        click.echo(f"⚠️  {len(unconverged)} amplitude(s) did not converge at M={config.modes}", err=True)

    if verify:
        config.out = None
        _report('Hill discriminant cross-check', band_oracle_audit(M=config.modes), config, started)


if __name__ == '__main__':
    main()
