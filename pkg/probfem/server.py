# probfem/server.py
"""MCP server for finite element inverse problems.

This module provides a Model Context Protocol server that lets AI
assistants run posterior sampling experiments, compare result bundles
and inspect the computational meshes. Run it as:
    python -m probfem.server
"""
import asyncio
from typing import Any

from mcp.server.models import InitializationOptions
from mcp.server import NotificationOptions, Server
from mcp.server.stdio import stdio_server
from mcp.types import (
    Tool,
    TextContent,
    ImageContent,
    EmbeddedResource,
)

from probfem import __version__
from probfem.config import Config, available_presets
from probfem.errors import DataMismatchError, ProbFemError
from probfem.experiments.compare import compare_directories, format_metrics_markdown
from probfem.experiments.data import pullout_exact_solution
from probfem.experiments.runner import ExperimentRunner, generate_mesh as build_mesh
from probfem.mesh.io import write_mesh
from probfem.mesh.mesh import Mesh
from probfem.models import ExperimentResult, MethodKind, ProblemKind


# Create MCP server instance
server = Server("probfem")


@server.list_tools()
async def handle_list_tools() -> list[Tool]:
    """List available tools."""
    return [
        Tool(
            name="run_experiment",
            description=(
                "Sample the posterior of a synthetic inverse problem (pullout bar or "
                "three-point bending beam) with one finite element likelihood model: "
                "fem, bfem, rmfem, statfem or exact (pullout only). Writes a result "
                "bundle with the chain, summaries and marginal histograms and returns "
                "the posterior summary."
            ),
            inputSchema={
                "type": "object",
                "properties": {
                    "preset": {
                        "type": "string",
                        "enum": available_presets(),
                        "description": "Built-in experiment preset"
                    },
                    "config_path": {
                        "type": "string",
                        "description": "Path to an experiment JSON file. "
                                       "If both preset and config_path are provided, preset takes precedence."
                    },
                    "method": {
                        "type": "string",
                        "enum": [m.value for m in MethodKind],
                        "description": "Optional likelihood model overriding the configured one"
                    },
                    "seed": {
                        "type": "number",
                        "description": "Optional chain seed"
                    },
                    "output_path": {
                        "type": "string",
                        "description": "Optional directory receiving the result bundle"
                    }
                }
            }
        ),
        Tool(
            name="compare_posteriors",
            description=(
                "Compare result bundles sampled on the same observation data. "
                "Reports for each bundle whether the ground truth lies in the 95% "
                "credible region, the posterior mean error, marginal standard deviations "
                "relative to the exact posterior and whether the error shrinks with h."
            ),
            inputSchema={
                "type": "object",
                "properties": {
                    "bundle_paths": {
                        "type": "array",
                        "items": {"type": "string"},
                        "description": "Result bundle directories (at least two)"
                    },
                    "output_path": {
                        "type": "string",
                        "description": "Optional directory receiving metrics.json and metrics.md"
                    }
                },
                "required": ["bundle_paths"]
            }
        ),
        Tool(
            name="generate_mesh",
            description=(
                "Generate the computational mesh of a problem at element size h; the "
                "three-point beam is meshed with the hole at its true position. "
                "Returns node and element counts and optionally writes the mesh file."
            ),
            inputSchema={
                "type": "object",
                "properties": {
                    "problem": {
                        "type": "string",
                        "enum": [p.value for p in ProblemKind],
                        "description": "Forward problem (default: three_point)"
                    },
                    "h": {
                        "type": "number",
                        "description": "Element size (default: 0.2)"
                    },
                    "output_path": {
                        "type": "string",
                        "description": "Optional plain-text mesh file to write"
                    }
                }
            }
        ),
        Tool(
            name="pullout_solution",
            description=(
                "Evaluate the closed-form displacement of the pullout bar on an "
                "elastic foundation, u(x) = F cosh(nu x) / (sqrt(k EA) sinh(nu)) "
                "with nu = sqrt(k / EA)."
            ),
            inputSchema={
                "type": "object",
                "properties": {
                    "EA": {"type": "number", "description": "Axial stiffness (default: 0.8)"},
                    "k": {"type": "number", "description": "Foundation stiffness (default: 70)"},
                    "F": {"type": "number", "description": "End load (default: 10)"},
                    "x": {"type": "number", "description": "Position in [0, 1] (default: 1)"}
                }
            }
        )
    ]


@server.call_tool()
async def handle_call_tool(name: str, arguments: dict[str, Any]) -> list[TextContent | ImageContent | EmbeddedResource]:
    """Handle tool calls."""
    if name == "run_experiment":
        return await run_experiment(arguments)
    elif name == "compare_posteriors":
        return await compare_posteriors(arguments)
    elif name == "generate_mesh":
        return await generate_mesh(arguments)
    elif name == "pullout_solution":
        return await pullout_solution(arguments)
    else:
        raise ValueError(f"Unknown tool: {name}")


async def run_experiment(arguments: dict[str, Any]) -> list[TextContent]:
    """Run one experiment and return its posterior summary.

    Args:
        arguments: Tool arguments with preset or config_path and optional overrides

    Returns:
        TextContent containing the posterior summary
    """
    preset = arguments.get("preset")
    config_path = arguments.get("config_path")
    if not preset and not config_path:
        return [TextContent(type="text", text="Error: preset or config_path is required")]

    try:
        config = Config.load_preset(preset) if preset else Config.load(config_path)
        seed = arguments.get("seed")
        config = config.with_overrides(
            seed=int(seed) if seed is not None else None,
            output_dir=arguments.get("output_path"),
            method=arguments.get("method"),
        )
        result = await asyncio.to_thread(ExperimentRunner(config).run)
        return [TextContent(type="text", text=format_experiment_result(result))]

    except FileNotFoundError as e:
        return [TextContent(type="text", text=f"Error: Configuration not found - {e}")]
    except ValueError as e:
        return [TextContent(type="text", text=f"Error: Invalid configuration - {e}")]
    except ProbFemError as e:
        return [TextContent(type="text", text=f"Error: Experiment failed - {e}")]


async def compare_posteriors(arguments: dict[str, Any]) -> list[TextContent]:
    """Compare result bundles and return the metrics table."""
    paths = arguments.get("bundle_paths") or []
    if len(paths) < 2:
        return [TextContent(type="text", text="Error: at least two bundle_paths are required")]

    try:
        metrics = compare_directories(paths, output=arguments.get("output_path"))
        output = "\n".join(["# Posterior Comparison", "", format_metrics_markdown(metrics), ""])
        return [TextContent(type="text", text=output)]

    except FileNotFoundError as e:
        return [TextContent(type="text", text=f"Error: Bundle not found - {e}")]
    except DataMismatchError as e:
        return [TextContent(type="text", text=f"Error: {e}")]
    except (ValueError, KeyError) as e:
        return [TextContent(type="text", text=f"Error: Invalid bundle - {e}")]


async def generate_mesh(arguments: dict[str, Any]) -> list[TextContent]:
    """Mesh a problem and return its statistics."""
    try:
        problem = ProblemKind(arguments.get("problem", ProblemKind.THREE_POINT.value))
        h = float(arguments.get("h", 0.2))
        mesh = build_mesh(problem, h)
        output_path = arguments.get("output_path")
        if output_path:
            write_mesh(mesh, output_path)
        return [TextContent(type="text", text=format_mesh(mesh, problem, h, output_path))]

    except ValueError as e:
        return [TextContent(type="text", text=f"Error: Invalid mesh request - {e}")]
    except ProbFemError as e:
        return [TextContent(type="text", text=f"Error: Meshing failed - {e}")]


async def pullout_solution(arguments: dict[str, Any]) -> list[TextContent]:
    """Closed-form pullout displacement."""
    try:
        EA = float(arguments.get("EA", 0.8))
        k = float(arguments.get("k", 70.0))
        F = float(arguments.get("F", 10.0))
        x = float(arguments.get("x", 1.0))
        u = float(pullout_exact_solution(EA, k, F, x))
        return [TextContent(type="text", text=f"u({x:g}) = {u:.6f} for EA={EA:g}, k={k:g}, F={F:g}")]
    except ValueError as e:
        return [TextContent(type="text", text=f"Error: {e}")]


def format_experiment_result(result: ExperimentResult) -> str:
    """Format an experiment result as readable text.

    Args:
        result: ExperimentResult of a finished run

    Returns:
        Formatted text output
    """
    lines = []
    lines.append(f"# Posterior: {result.problem.value} / {result.method.value}")
    lines.append("")
    lines.append(f"- Mesh size h: {result.h:g}")
    lines.append(f"- Chain seed: {result.seed}")
    lines.append(f"- Acceptance rate: {result.acceptance_rate:.3f}")
    if result.n_failed:
        lines.append(f"- Failed likelihood evaluations: {result.n_failed}")
    lines.append(f"- Runtime: {result.runtime_seconds:.1f}s")
    lines.append("")
    lines.append("| Parameter | Truth | Mean | Std | 95% interval |")
    lines.append("|-----------|-------|------|-----|--------------|")
    for name, stats in result.parameters.items():
        truth = result.ground_truth.get(name)
        truth_text = f"{truth:.4g}" if truth is not None else "-"
        lines.append(f"| {name} | {truth_text} | {stats.mean:.4g} | {stats.std:.3g} | "
                     f"[{stats.q025:.4g}, {stats.q975:.4g}] |")
    lines.append("")
    if result.files:
        lines.append(f"Result bundle: {result.output_dir} ({len(result.files)} files)")
        lines.append("")

    return "\n".join(lines)


def format_mesh(mesh: Mesh, problem: ProblemKind, h: float, output_path=None) -> str:
    """Format mesh statistics as readable text."""
    lines = []
    lines.append(f"# Mesh: {problem.value}, h = {h:g}")
    lines.append("")
    lines.append(f"- Nodes: {mesh.n_nodes}")
    lines.append(f"- Elements: {mesh.n_elements}")
    if mesh.dim == 2:
        tags = sorted(set(mesh.boundary_tags))
        lines.append(f"- Boundary edges: {len(mesh.boundary_edges)} ({', '.join(tags)})")
    if output_path:
        lines.append(f"- Written to: {output_path}")
    lines.append("")

    return "\n".join(lines)


async def main():
    """Main entry point for the MCP server."""
    async with stdio_server() as (read_stream, write_stream):
        await server.run(
            read_stream,
            write_stream,
            InitializationOptions(
                server_name="probfem",
                server_version=__version__,
                capabilities=server.get_capabilities(
                    notification_options=NotificationOptions(),
                    experimental_capabilities={},
                )
            )
        )


def run():
    """Console-script entry point."""
    try:
        asyncio.run(main())
    except KeyboardInterrupt:
        print("\nServer stopped.")


if __name__ == "__main__":
    run()
