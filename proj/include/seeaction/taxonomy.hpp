#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seeaction {

enum class CommandClass : int {
  Click,
  Drag,
  Hover,
  ScrollDown,
  ScrollUp,
  Select,
  Type,
  ZoomIn,
  ZoomOut,
  Appear,
  Disappear,
};

enum class WidgetClass : int {
  Button,
  Checkbox,
  Dropdown,
  Icon,
  Image,
  Text,
  Window,
  Page,
  Tab,
  Popup,
  Others,
};

inline constexpr int kNumCommands = 11;
inline constexpr int kNumWidgets = 11;

// "click", "scroll down", ... as used in action scripts.
std::string_view command_name(CommandClass c);
// "Button", "Checkbox", ...
std::string_view widget_name(WidgetClass w);

// Case-insensitive; accepts "scroll down", "scroll_down" and "ScrollDown".
std::optional<CommandClass> parse_command(std::string_view s);
std::optional<WidgetClass> parse_widget(std::string_view s);

CommandClass command_from_id(int id);
WidgetClass widget_from_id(int id);

const std::array<CommandClass, kNumCommands>& all_commands();
const std::array<WidgetClass, kNumWidgets>& all_widgets();

// Widgets each command can act on in generated data.
const std::vector<WidgetClass>& compatible_widgets(CommandClass c);
bool is_compatible(CommandClass c, WidgetClass w);

// [command] [widget] [location]
struct StructuredAction {
  CommandClass command = CommandClass::Click;
  WidgetClass widget = WidgetClass::Button;
  std::vector<std::string> location;

  bool operator==(const StructuredAction&) const = default;
};

std::string join_words(const std::vector<std::string>& words);
std::vector<std::string> split_words(std::string_view text);

}  // namespace seeaction
