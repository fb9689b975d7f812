"""Helper scripts for regenerating results."""
