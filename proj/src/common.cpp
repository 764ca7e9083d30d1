#include "gpnam/common.hpp"

#include "gpnam/error.hpp"

namespace gpnam {

std::string_view to_string(Task task) {
  return task == Task::regression ? "regression" : "binary_classification";
}

Task parse_task(std::string_view text) {
  if (text == "regression" || text == "reg") return Task::regression;
  if (text == "binary_classification" || text == "clf" || text == "classification") {
    return Task::binary_classification;
  }
  fail(ErrorKind::invalid_argument, "unknown task '" + std::string(text) + "'");
}

}  // namespace gpnam
