"""Map templates for synthetic scenes.

Two templates cover every map-dependent predicate: a straight multi-lane road
(with a bike lane and a lane-neighbor pair for lane changes) and a four-way
intersection with crosswalks, stop signs, and a bus lane. Boundary polylines
are ordered along the travel direction so centerline tangents follow traffic.
"""

from __future__ import annotations

from scenariomine.hdmap import DrivableArea, HDMap, LaneSegment, PedestrianCrossing, StopSign

LANE_WIDTH = 3.7


def _rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def straight_road_map() -> HDMap:
    """Straight road along +x: two forward lanes (neighbors), one oncoming
    lane, and a bike lane; no intersections, crossings, or stop signs."""
    lanes = [
        LaneSegment(
            "st.f1",
            "VEHICLE",
            left_boundary=[[-20.0, 3.7], [220.0, 3.7]],
            right_boundary=[[-20.0, 0.0], [220.0, 0.0]],
            left_neighbor="st.f2",
        ),
        LaneSegment(
            "st.f2",
            "VEHICLE",
            left_boundary=[[-20.0, 7.4], [220.0, 7.4]],
            right_boundary=[[-20.0, 3.7], [220.0, 3.7]],
            right_neighbor="st.f1",
        ),
        LaneSegment(
            "st.o1",
            "VEHICLE",
            left_boundary=[[220.0, -3.7], [-20.0, -3.7]],
            right_boundary=[[220.0, 0.0], [-20.0, 0.0]],
        ),
        LaneSegment(
            "st.b1",
            "BIKE",
            left_boundary=[[-20.0, 9.2], [220.0, 9.2]],
            right_boundary=[[-20.0, 7.4], [220.0, 7.4]],
        ),
    ]
    drivable = DrivableArea((_rect(-20.0, -5.5, 220.0, 10.5),))
    return HDMap(lanes, crossings=(), stop_signs=(), drivable=drivable)


def intersection_map() -> HDMap:
    """Four-way intersection at the origin, one lane per direction, crosswalks
    on every approach, two stop signs, and a bus lane beside the east road."""
    e = 3.7  # intersection half-width
    far = 120.0
    lanes = [
        # eastbound (+x), y in [-3.7, 0]
        LaneSegment(
            "ix.e.app",
            "VEHICLE",
            left_boundary=[[-far, 0.0], [-e, 0.0]],
            right_boundary=[[-far, -e], [-e, -e]],
            successors=("ix.e.mid",),
        ),
        LaneSegment(
            "ix.e.mid",
            "VEHICLE",
            left_boundary=[[-e, 0.0], [e, 0.0]],
            right_boundary=[[-e, -e], [e, -e]],
            successors=("ix.e.out",),
            is_intersection=True,
        ),
        LaneSegment(
            "ix.e.out",
            "VEHICLE",
            left_boundary=[[e, 0.0], [far, 0.0]],
            right_boundary=[[e, -e], [far, -e]],
        ),
        # westbound (-x), y in [0, 3.7]
        LaneSegment(
            "ix.w.app",
            "VEHICLE",
            left_boundary=[[far, 0.0], [e, 0.0]],
            right_boundary=[[far, e], [e, e]],
            successors=("ix.w.mid",),
        ),
        LaneSegment(
            "ix.w.mid",
            "VEHICLE",
            left_boundary=[[e, 0.0], [-e, 0.0]],
            right_boundary=[[e, e], [-e, e]],
            successors=("ix.w.out",),
            is_intersection=True,
        ),
        LaneSegment(
            "ix.w.out",
            "VEHICLE",
            left_boundary=[[-e, 0.0], [-far, 0.0]],
            right_boundary=[[-e, e], [-far, e]],
        ),
        # northbound (+y), x in [0, 3.7]
        LaneSegment(
            "ix.n.app",
            "VEHICLE",
            left_boundary=[[0.0, -far], [0.0, -e]],
            right_boundary=[[e, -far], [e, -e]],
            successors=("ix.n.mid",),
        ),
        LaneSegment(
            "ix.n.mid",
            "VEHICLE",
            left_boundary=[[0.0, -e], [0.0, e]],
            right_boundary=[[e, -e], [e, e]],
            successors=("ix.n.out",),
            is_intersection=True,
        ),
        LaneSegment(
            "ix.n.out",
            "VEHICLE",
            left_boundary=[[0.0, e], [0.0, far]],
            right_boundary=[[e, e], [e, far]],
        ),
        # southbound (-y), x in [-3.7, 0]
        LaneSegment(
            "ix.s.app",
            "VEHICLE",
            left_boundary=[[0.0, far], [0.0, e]],
            right_boundary=[[-e, far], [-e, e]],
            successors=("ix.s.mid",),
        ),
        LaneSegment(
            "ix.s.mid",
            "VEHICLE",
            left_boundary=[[0.0, e], [0.0, -e]],
            right_boundary=[[-e, e], [-e, -e]],
            successors=("ix.s.out",),
            is_intersection=True,
        ),
        LaneSegment(
            "ix.s.out",
            "VEHICLE",
            left_boundary=[[0.0, -e], [0.0, -far]],
            right_boundary=[[-e, -e], [-e, -far]],
        ),
        # bus lane beside the east road, westbound
        LaneSegment(
            "ix.bus",
            "BUS",
            left_boundary=[[far, 3.7], [e, 3.7]],
            right_boundary=[[far, 7.4], [e, 7.4]],
        ),
    ]
    crossings = (
        PedestrianCrossing("ix.cw.w", _rect(-6.7, -4.2, -4.2, 4.2)),
        PedestrianCrossing("ix.cw.e", _rect(4.2, -4.2, 6.7, 4.2)),
        PedestrianCrossing("ix.cw.s", _rect(-4.2, -6.7, 4.2, -4.2)),
        PedestrianCrossing("ix.cw.n", _rect(-4.2, 4.2, 4.2, 6.7)),
    )
    import math

    stop_signs = (
        StopSign("ix.ss.e", [-7.0, -4.5], math.pi, controlled_lane_ids=("ix.e.app",)),
        StopSign("ix.ss.n", [4.5, -7.0], -math.pi / 2.0, controlled_lane_ids=("ix.n.app",)),
    )
    drivable = DrivableArea(
        (
            _rect(-far, -5.5, far, 5.5),
            _rect(-5.5, -far, 5.5, far),
            _rect(e, 3.7, far, 9.0),
        )
    )
    return HDMap(lanes, crossings=crossings, stop_signs=stop_signs, drivable=drivable)


TEMPLATES = {
    "straight": straight_road_map,
    "intersection": intersection_map,
}


def build_template(name: str) -> HDMap:
    try:
        return TEMPLATES[name]()
    except KeyError:
        raise ValueError(f"unknown map template {name!r}; known: {sorted(TEMPLATES)}") from None
