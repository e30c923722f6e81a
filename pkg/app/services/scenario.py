import logging
import math

import numpy as np

from app.config import SimulationSettings
from app.enums import Side
from app.schemas.geometry import Attitude, Position3
from app.schemas.harness import NavEstimate, PathLossStep, Scenario
from app.services.channel import beamformer, beamforming_gain, los_channel, path_loss_db
from app.services.jitter import sample_attitude

logger = logging.getLogger(__name__)

# Fixed placements used for the jitter and path-loss studies
REFERENCE_SCENARIOS: dict[int, Scenario] = {
    1: Scenario(position=Position3(x=-100.0, y=100.0, z=50.0), desired=Attitude()),
    2: Scenario(position=Position3(x=-100.0, y=100.0, z=50.0), desired=Attitude(yaw=1.0)),
    3: Scenario(position=Position3(x=0.0, y=100.0, z=50.0), desired=Attitude()),
}


def sample_scenario(settings: SimulationSettings, rng: np.random.Generator) -> Scenario:
    """Draw a UAV position on the upper hemisphere and its desired attitude.

    The height fraction ``|sin(elevation)|`` is uniform on
    ``[0, max_abs_sin_elevation)``, which is uniform over the hemisphere
    surface with the polar cap removed. The azimuth is uniform. The desired
    yaw is uniform on (-pi, pi) unless ``random_desired_yaw`` is off.
    """
    radius = settings.hemisphere_radius_m
    height = rng.uniform(0.0, settings.max_abs_sin_elevation)
    azimuth = rng.uniform(-math.pi, math.pi)
    yaw = settings.desired_yaw_rad
    if settings.random_desired_yaw:
        yaw = rng.uniform(-math.pi, math.pi)
    horizontal = radius * math.sqrt(1 - height**2)
    return Scenario(
        position=Position3(
            x=horizontal * math.cos(azimuth),
            y=horizontal * math.sin(azimuth),
            z=radius * height,
        ),
        desired=Attitude(
            yaw=yaw,
            pitch=settings.desired_pitch_rad,
            roll=settings.desired_roll_rad,
        ),
    )


def nav_estimate(
    scenario: Scenario,
    settings: SimulationSettings,
    rng: np.random.Generator,
) -> NavEstimate:
    """Noisy position fix plus the desired attitude as the IMU reading."""
    noise = rng.normal(0.0, settings.nav_position_std_m, 3)
    return NavEstimate(
        position=Position3.from_array(scenario.position.as_array() + noise),
        attitude=scenario.desired,
    )


def pathloss_trace(
    scenario: Scenario,
    settings: SimulationSettings,
    n_steps: int,
    rng: np.random.Generator,
) -> list[PathLossStep]:
    """Path loss of the three beamforming schemes under i.i.d. jitter.

    Scheme 1 points both beams at the true angles, scheme 2 uses the navigation
    angle at the BS only and scheme 3 uses navigation angles at both ends. Each
    step draws a jittered attitude and then a fresh position fix.
    """
    bs_geom = settings.bs_geometry
    uav_geom = settings.uav_geometry
    jm = settings.jitter_model
    steps = []
    for step in range(n_steps):
        attitude = sample_attitude(scenario.desired, jm, rng)
        nav = nav_estimate(scenario, settings, rng)
        ch = los_channel(scenario.position, attitude, bs_geom, uav_geom)

        f_true = beamformer(ch.aoa_bs, bs_geom, Side.bs)
        m_true = beamformer(ch.aoa_uav, uav_geom, Side.uav)
        f_nav = beamformer(nav.rough_bs, bs_geom, Side.bs)
        m_nav = beamformer(nav.rough_uav, uav_geom, Side.uav)

        losses = [
            path_loss_db(beamforming_gain(m, ch, f), ch.wavelength, ch.distance)
            for m, f in ((m_true, f_true), (m_true, f_nav), (m_nav, f_nav))
        ]
        steps.append(
            PathLossStep(
                step=step,
                yaw=attitude.yaw,
                pitch=attitude.pitch,
                roll=attitude.roll,
                scheme1_db=losses[0],
                scheme2_db=losses[1],
                scheme3_db=losses[2],
            ),
        )
    logger.debug(f"Path-loss trace of {n_steps} steps at {scenario.position}")
    return steps
