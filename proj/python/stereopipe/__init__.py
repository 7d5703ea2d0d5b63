"""Semi-global stereo matching pipeline.

Disparity maps cross the Python boundary as float32 arrays holding
disparities in pixels, with NaN marking invalid pixels. Images are 2-D
uint8 arrays.
"""

from ._core import (
    FilterConfig,
    MatchConfig,
    PipelineConfig,
    PostConfig,
    Profile,
    StageToggles,
    apply_config,
    census_transform,
    evaluate,
    gen_scene,
    load_disparity,
    load_map,
    load_pgm,
    match,
    max_disparity,
    remap,
    save_disparity,
    save_map,
    save_pgm,
)

__version__ = "1.0.0"

__all__ = [
    "FilterConfig",
    "MatchConfig",
    "PipelineConfig",
    "PostConfig",
    "Profile",
    "StageToggles",
    "apply_config",
    "census_transform",
    "evaluate",
    "gen_scene",
    "load_disparity",
    "load_map",
    "load_pgm",
    "match",
    "max_disparity",
    "remap",
    "save_disparity",
    "save_map",
    "save_pgm",
]
