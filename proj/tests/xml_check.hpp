#pragma once

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <sstream>
#include <string>

inline bool well_formed_xml(const std::string& text) {
  try {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    boost::property_tree::read_xml(in, tree);
    return tree.count("svg") == 1;
  } catch (const boost::property_tree::xml_parser_error&) {
    return false;
  }
}
