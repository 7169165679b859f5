from identifiability import reports
from identifiability.io_equations import coefficient_map_of, io_equations
from identifiability.management.analysis import AnalysisCommand


class Command(AnalysisCommand):
    help = """Print the input-output equations of a model and its coefficient map."""

    def analyse(self, model, options):
        equations = io_equations(model)
        cmap = coefficient_map_of(equations, model.num_params)
        data = reports.io_eq_data(model, equations, cmap, options["seed"], options["trials"])
        return data, reports.io_eq_lines(data)
