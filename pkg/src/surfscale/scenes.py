'''Built-in experiment scenes: a target region, its active boundary, and
the sampling density, bundled under a short name.

Scenes are constructed on demand from a textual spec like ``disk:0.3``
(name, then colon-separated positional parameters). Construction runs a
set of consistency probes tying the membership oracle to the declared
boundary: points nudged inward from boundary samples must test inside,
outward ones outside, and the reference point and volume must be sane.
A scene that fails its probes never reaches an experiment.
'''

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, UnknownName
from .geometry import (BallRegion, ConvexPolygonRegion, GraphSubRegion,
                       PolygonalChain, Region, RegularPolygonRegion)
from .sampler import Density, indicator_density, uniform_density

PROBE_EPS = 1e-7
PROBE_POINTS = 64


@dataclass(frozen=True)
class Scene:
    '''A named experiment setup binding region, boundary, and density.

    Attributes:
        name: catalog spec the scene was built from.
        region: target set A with its active_boundary surface.
        density: sampling density kappa on the unit cube.
        boundary_kappa: kappa value along the active boundary (the inside
            trace for indicator densities), used by the limit constants.
    '''
    name: str
    region: Region
    density: Density
    boundary_kappa: float = 1.0
    notes: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.region.d

    @property
    def boundary(self):
        return self.region.active_boundary


def _disk(r: float = 0.25) -> Scene:
    r = float(r)
    if not 0.0 < r < 0.5:
        raise DegenerateInput('disk radius must lie in (0, 0.5)')
    region = RegularPolygonRegion((0.5, 0.5), r)
    return Scene(name='disk:%g' % r, region=region,
                 density=uniform_density(2),
                 notes={'target_volume': np.pi * r * r,
                        'target_perimeter': 2.0 * np.pi * r})


def _square_half() -> Scene:
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.0, 0.5]])
    # chain ordered so the segment normal points out of A = {y <= 1/2}
    boundary = PolygonalChain(np.array([[1.0, 0.5], [0.0, 0.5]]))
    region = ConvexPolygonRegion(verts, active_boundary=boundary)
    return Scene(name='square-half', region=region,
                 density=uniform_density(2),
                 notes={'target_volume': 0.5, 'target_perimeter': 1.0})


def _triangle_pareto() -> Scene:
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    hypotenuse = PolygonalChain(np.array([[1.0, 0.0], [0.0, 1.0]]))
    region = ConvexPolygonRegion(verts, active_boundary=hypotenuse)
    return Scene(name='triangle-pareto', region=region,
                 density=indicator_density(region, 2.0), boundary_kappa=2.0,
                 notes={'target_volume': 0.5,
                        'boundary_slope': -1.0})


def _sine_boundary() -> Scene:
    def G(x):
        return 0.5 + 0.2 * np.sin(2.0 * np.pi * np.asarray(x))

    def dG(x):
        return 0.4 * np.pi * np.cos(2.0 * np.pi * np.asarray(x))

    region = GraphSubRegion.from_function(G, dG, chord_tol=1e-5)
    # membership is decided by the chord polygon, which sags below the
    # smooth graph by up to chord_tol, so probes must step farther
    return Scene(name='sine-boundary', region=region,
                 density=uniform_density(2),
                 notes={'target_volume': 0.5, 'probe_eps': 1e-4})


def _sphere(r: float = 0.25) -> Scene:
    r = float(r)
    if not 0.0 < r < 0.5:
        raise DegenerateInput('sphere radius must lie in (0, 0.5)')
    region = BallRegion((0.5, 0.5, 0.5), r)
    return Scene(name='sphere:%g' % r, region=region,
                 density=uniform_density(3),
                 notes={'target_volume': 4.0 / 3.0 * np.pi * r ** 3,
                        'target_area': 4.0 * np.pi * r * r})


BUILDERS = {
    'disk': _disk,
    'square-half': _square_half,
    'triangle-pareto': _triangle_pareto,
    'sine-boundary': _sine_boundary,
    'sphere': _sphere,
}


def scene_names() -> list[str]:
    return sorted(BUILDERS)


def build_scene(spec: str, check: bool = True) -> Scene:
    '''Construct (and by default probe) the scene named by ``spec``.

    spec is ``name`` or ``name:param1:param2``; parameters are floats
    passed positionally to the builder.
    '''
    head, _, rest = str(spec).partition(':')
    if head not in BUILDERS:
        raise UnknownName('scene', head, scene_names())
    args = [float(tok) for tok in rest.split(':') if tok] if rest else []
    scene = BUILDERS[head](*args)
    if check:
        check_scene(scene)
    return scene


def check_scene(scene: Scene, k: int = PROBE_POINTS,
                eps: float | None = None) -> None:
    '''Probe membership/boundary/density consistency; raise on failure.

    Boundary samples nudged inward along the inner normal must land in
    the region and outward ones off it. The sphere scene uses the exact
    metric versions of the same probes.
    '''
    if eps is None:
        eps = float(scene.notes.get('probe_eps', PROBE_EPS))
    region = scene.region
    if not (0.0 < region.volume() < 1.0):
        raise DegenerateInput('%s: volume %g outside (0, 1)'
                              % (scene.name, region.volume()))
    if not bool(region.contains(region.inside_reference)[0]):
        raise DegenerateInput('%s: reference point tests outside' % scene.name)
    boundary = scene.boundary
    if boundary.measure() <= 0.0:
        raise DegenerateInput('%s: boundary has no measure' % scene.name)
    if getattr(boundary, 'closed', True):
        ys = np.atleast_2d(boundary.sample(k))
    else:
        # at an open end the inner normal is tangent to the rest of the
        # region boundary, so the membership probe is ill posed there
        ys = np.atleast_2d(boundary.sample(k + 2))[1:-1]
    normals = np.array([boundary.normal_at(y) for y in ys])
    inner = region.contains(ys - eps * normals)
    outer = region.contains(ys + eps * normals)
    if not bool(np.all(inner)):
        raise DegenerateInput('%s: inward probe left the region' % scene.name)
    if bool(np.any(outer)):
        raise DegenerateInput('%s: outward probe stayed inside' % scene.name)
    vals = scene.density.values(ys - eps * normals)
    if np.any(vals <= 0.0):
        raise DegenerateInput('%s: density vanishes at the boundary'
                              % scene.name)
    want = scene.boundary_kappa
    if np.any(np.abs(vals - want) > 1e-6 * max(1.0, abs(want))):
        raise DegenerateInput('%s: boundary_kappa %g does not match density'
                              % (scene.name, want))
