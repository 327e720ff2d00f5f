"""Command line front end."""

from ._config import (
    OUTPUT_FORMATS as OUTPUT_FORMATS,
    ConvergeSettings as ConvergeSettings,
    MeshSettings as MeshSettings,
    OutputSettings as OutputSettings,
    RunConfig as RunConfig,
    SearchSettings as SearchSettings,
    load_config as load_config,
    merge_preset as merge_preset,
    parse_box as parse_box,
    parse_complex as parse_complex,
    parse_config as parse_config,
    parse_float as parse_float,
    parse_point as parse_point,
    parse_vertices as parse_vertices,
    read_settings as read_settings,
)
from ._main import (
    demo_function as demo_function,
    dump_matrices as dump_matrices,
    main as main,
    run_bands as run_bands,
    run_converge as run_converge,
    run_indicator_map as run_indicator_map,
)
