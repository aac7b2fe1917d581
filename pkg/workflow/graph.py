#LangGraph workflow for invariant-form synthesis.
#Defines the nodes, the parallel fan-out over methods, and optional tracing.


import logging
import os
from typing import List

from langgraph.graph import END, StateGraph

from workflow.nodes import (
    algebraic_node,
    averaging_node,
    certify_node,
    close_group_node,
    contraction_node,
    cross_check_node,
    handle_rejection_node,
    route_after_screen,
    screen_node,
)
from workflow.state import SynthesisState

logger = logging.getLogger(__name__)


#Langfuse handler when keys are configured, otherwise no callbacks.
def tracing_callbacks() -> List:
    if not (os.getenv("LANGFUSE_PUBLIC_KEY") and os.getenv("LANGFUSE_SECRET_KEY")):
        return []
    try:
        from langfuse.langchain import CallbackHandler
    except ImportError as exc:
        logger.warning("Langfuse keys set but tracing is unavailable: %s", exc)
        return []
    return [CallbackHandler()]


def build_graph() -> StateGraph:
    """
    Build and compile the synthesis state machine.

    Graph flow:
    START → close_group → screen → [passed?]
                                     ↓ yes                         ↓ no
                 ┌───────────────────┼───────────────────┐   handle_rejection → END
                 ↓                   ↓                   ↓
             averaging          contraction          algebraic     (only the requested ones)
                 └───────────────────┼───────────────────┘
                                     ↓
                                cross_check → certify → END
    """

    workflow = StateGraph(SynthesisState)

    workflow.add_node("close_group", close_group_node)
    workflow.add_node("screen", screen_node)
    workflow.add_node("averaging", averaging_node)
    workflow.add_node("contraction", contraction_node)
    workflow.add_node("algebraic", algebraic_node)
    workflow.add_node("cross_check", cross_check_node)
    workflow.add_node("certify", certify_node)
    workflow.add_node("handle_rejection", handle_rejection_node)

    workflow.set_entry_point("close_group")
    workflow.add_edge("close_group", "screen")

    # A list return runs the synthesizers in the same step
    workflow.add_conditional_edges(
        "screen",
        route_after_screen,
        {
            "averaging": "averaging",
            "contraction": "contraction",
            "algebraic": "algebraic",
            "handle_rejection": "handle_rejection",
        }
    )

    for method in ("averaging", "contraction", "algebraic"):
        workflow.add_edge(method, "cross_check")

    workflow.add_edge("cross_check", "certify")
    workflow.add_edge("certify", END)
    workflow.add_edge("handle_rejection", END)

    return workflow.compile()
