import logging
import math
from collections import defaultdict
from collections.abc import Sequence
from functools import partial

import numpy as np

from app.config import SimulationSettings
from app.enums import Method, Side
from app.schemas.geometry import AoaPair
from app.schemas.harness import ExperimentPlan, ExperimentResult, SummaryRow, TrialRecord
from app.schemas.sensing import METHOD_PRESETS
from app.services.channel import (
    beamformer,
    data_rate,
    los_channel,
    max_received_power_dbm,
    measure_batch,
    received_power_dbm,
)
from app.services.estimator import estimate_aoa
from app.services.geometry import wrap_sub
from app.services.jitter import sample_attitude
from app.services.scenario import nav_estimate, sample_scenario
from app.services.sensing import sensing_matrix
from app.trial_pool import TrialPoolManager
from app.utils import dbm_to_watts, trial_rng

logger = logging.getLogger(__name__)

MISALIGNMENT_MARGIN_DB = 10.0

# Stream 0 of every trial drives the scenario, jitter and navigation draws;
# training methods use stream 1 + their position in Method.
SCENARIO_STREAM = 0


def squared_error(estimate: AoaPair, truth: AoaPair) -> float:
    """Wrapped squared cosine-angle error summed over both axes."""
    return float(
        wrap_sub(estimate.psi, truth.psi) ** 2 + wrap_sub(estimate.omega, truth.omega) ** 2,
    )


def _method_stream(method: Method) -> int:
    return 1 + list(Method).index(method)


def run_trial(settings: SimulationSettings, plan: ExperimentPlan, trial: int) -> list[TrialRecord]:
    """One Monte-Carlo trial: a scenario shared by every method, power and length.

    The attitude is drawn once and holds for the whole coherence block. For a
    training method the sensing matrix depends on (trial, method, length) and the
    noise additionally on the transmit power.
    """
    bs_geom = settings.bs_geometry
    uav_geom = settings.uav_geometry
    noise_w = settings.noise_power_w
    cfg = settings.estimator_config

    rng = trial_rng(settings.seed, trial, SCENARIO_STREAM)
    scenario = sample_scenario(settings, rng)
    attitude = sample_attitude(scenario.desired, settings.jitter_model, rng)
    nav = nav_estimate(scenario, settings, rng)
    ch = los_channel(scenario.position, attitude, bs_geom, uav_geom)
    rough_uav = nav.rough_uav
    f = beamformer(nav.rough_bs, bs_geom, Side.bs)

    def record(
        method: Method,
        tx_power_dbm: float,
        n_measurements: int,
        estimate: AoaPair,
    ) -> TrialRecord:
        m = beamformer(estimate, uav_geom, Side.uav)
        received = received_power_dbm(ch, m, f, tx_power_dbm)
        threshold = max_received_power_dbm(ch, tx_power_dbm) - MISALIGNMENT_MARGIN_DB
        rate = data_rate(ch, m, f, dbm_to_watts(tx_power_dbm), noise_w)
        data_share = (settings.coherence_intervals - n_measurements) / settings.coherence_intervals
        return TrialRecord(
            trial=trial,
            seed=settings.seed,
            method=method,
            tx_power_dbm=tx_power_dbm,
            n_measurements=n_measurements,
            distance_m=ch.distance,
            true_psi_bs=ch.aoa_bs.psi,
            true_omega_bs=ch.aoa_bs.omega,
            nav_psi_bs=nav.rough_bs.psi,
            nav_omega_bs=nav.rough_bs.omega,
            true_psi_uav=ch.aoa_uav.psi,
            true_omega_uav=ch.aoa_uav.omega,
            est_psi_uav=estimate.psi,
            est_omega_uav=estimate.omega,
            squared_error=squared_error(estimate, ch.aoa_uav),
            received_power_dbm=received,
            threshold_dbm=threshold,
            misaligned=received < threshold,
            data_rate=rate,
            spectral_efficiency=rate * data_share,
        )

    records = []
    for method in plan.methods:
        if not method.is_training:
            records.extend(record(method, tx, 0, rough_uav) for tx in plan.tx_powers_dbm)
            continue

        preset = METHOD_PRESETS[method]
        stream = _method_stream(method)
        for n_index, n in enumerate(plan.n_measurements):
            spec = preset.spec(n, rough_uav, uav_geom)
            matrix = sensing_matrix(spec, trial_rng(settings.seed, trial, stream, n_index))
            for tx_index, tx in enumerate(plan.tx_powers_dbm):
                noise_rng = trial_rng(settings.seed, trial, stream, n_index, tx_index + 1)
                y = measure_batch(ch, f, matrix.columns, dbm_to_watts(tx), noise_w, noise_rng)
                estimate = estimate_aoa(matrix, y, cfg)
                records.append(record(method, tx, n, estimate.aoa))
    logger.debug(f"Trial {trial}: {len(records)} records at d={ch.distance:.1f} m")
    return records


def run_experiment(
    settings: SimulationSettings,
    plan: ExperimentPlan,
    pool: TrialPoolManager | None = None,
) -> ExperimentResult:
    """Run ``settings.n_trials`` trials and aggregate them.

    Records are ordered by trial regardless of how the pool schedules work.
    """
    logger.info(
        f"Running {settings.n_trials} trials: methods={[m.value for m in plan.methods]}, "
        f"tx={list(plan.tx_powers_dbm)} dBm, N={list(plan.n_measurements)}",
    )
    worker = partial(run_trial, settings, plan)
    trials = range(settings.n_trials)
    if pool is None:
        per_trial = [worker(trial) for trial in trials]
    else:
        per_trial = pool.map(worker, trials)
    records = [record for trial_records in per_trial for record in trial_records]
    return ExperimentResult(records=records, summary=summarize(records))


def summarize(records: Sequence[TrialRecord]) -> list[SummaryRow]:
    """Aggregate records per (method, power, length) in method, power, length order.

    Means use numpy's pairwise summation.
    """
    groups: dict[tuple[Method, float, int], list[TrialRecord]] = defaultdict(list)
    for record in records:
        groups[record.method, record.tx_power_dbm, record.n_measurements].append(record)

    methods = list(Method)
    rows = []
    for key in sorted(groups, key=lambda k: (methods.index(k[0]), k[1], k[2])):
        group = groups[key]
        errors = np.array([r.squared_error for r in group])
        stderr = float(np.std(errors, ddof=1) / math.sqrt(len(errors))) if len(errors) > 1 else 0.0
        rows.append(
            SummaryRow(
                method=key[0],
                tx_power_dbm=key[1],
                n_measurements=key[2],
                n_trials=len(group),
                mse=float(np.mean(errors)),
                mse_stderr=stderr,
                misalignment_rate=float(np.mean([r.misaligned for r in group])),
                mean_data_rate=float(np.mean([r.data_rate for r in group])),
                spectral_efficiency=float(np.mean([r.spectral_efficiency for r in group])),
            ),
        )
    return rows


def _power_sweep(
    settings: SimulationSettings,
    methods: Sequence[Method],
    tx_powers_dbm: Sequence[float],
    n_measurements: int,
    pool: TrialPoolManager | None,
) -> ExperimentResult:
    plan = ExperimentPlan(
        methods=tuple(methods),
        tx_powers_dbm=tuple(tx_powers_dbm),
        n_measurements=(n_measurements,),
    )
    return run_experiment(settings, plan, pool)


def run_mse_experiment(
    settings: SimulationSettings,
    methods: Sequence[Method],
    tx_powers_dbm: Sequence[float],
    n_measurements: int,
    pool: TrialPoolManager | None = None,
) -> ExperimentResult:
    """AoA MSE per method over a transmit-power sweep at a fixed training length."""
    return _power_sweep(settings, methods, tx_powers_dbm, n_measurements, pool)


def run_misalignment_experiment(
    settings: SimulationSettings,
    methods: Sequence[Method],
    tx_powers_dbm: Sequence[float],
    n_measurements: int,
    pool: TrialPoolManager | None = None,
) -> ExperimentResult:
    """Misalignment rate per method over a transmit-power sweep.

    A trial is misaligned when its received power is more than 10 dB below the
    perfectly beamformed maximum at the same distance.
    """
    return _power_sweep(settings, methods, tx_powers_dbm, n_measurements, pool)


def run_spectral_efficiency(
    settings: SimulationSettings,
    methods: Sequence[Method],
    tx_powers_dbm: Sequence[float],
    n_values: Sequence[int],
    pool: TrialPoolManager | None = None,
) -> ExperimentResult:
    """Spectral efficiency per method, power and training length.

    Training spends ``N`` of the coherence block; navigation-only keeps all of it.
    """
    plan = ExperimentPlan(
        methods=tuple(methods),
        tx_powers_dbm=tuple(tx_powers_dbm),
        n_measurements=tuple(n_values),
    )
    return run_experiment(settings, plan, pool)
