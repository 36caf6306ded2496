"""
Subcommands of the robustik CLI.
"""
